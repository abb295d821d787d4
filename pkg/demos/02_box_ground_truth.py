"""Box ground truth from boxes alone.

Pixels outside every box are background; a small core rectangle around each
object center plus four spokes to the extreme points are object; everything
else inside boxes gets weight 0 and is ignored by training.

Run:  python3 demos/02_box_ground_truth.py   (writes demo_box_ground_truth.png)
"""

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap

from boxseg import (
    BACKGROUND,
    IGNORE,
    OBJECT,
    BoxGtConfig,
    SynthConfig,
    generate,
    rasterize_box_gt,
)

scene = generate(SynthConfig(seed=12, image_size=256, n_objects=3,
                             radius_range=(22, 40)))
boxes = [o.box for o in scene.annotation.objects]
label_map = rasterize_box_gt(boxes, scene.image.shape, BoxGtConfig(k=0.4))

# background blue, object green, ignore black (order: 0, 1, 255)
display = np.zeros(label_map.shape, dtype=int)
display[label_map.classes == BACKGROUND] = 0
display[label_map.classes == OBJECT] = 1
display[label_map.classes == IGNORE] = 2
cmap = ListedColormap(["#2c5f8a", "#3f9b42", "#111111"])

fig, axes = plt.subplots(1, 2, figsize=(12, 6))
axes[0].imshow(scene.image, cmap="gray", extent=(0, 256, 256, 0))
for box in boxes:
    corners = np.vstack([box.corners(), box.corners()[:1]])
    axes[0].plot(corners[:, 0], corners[:, 1], color="tab:orange", lw=1.5)
axes[0].set_title("image + annotated boxes")

axes[1].imshow(display, cmap=cmap, extent=(0, 256, 256, 0))
axes[1].set_title("box ground truth (blue=bg, green=object, black=ignored)")
for ax in axes:
    ax.set_xticks([])
    ax.set_yticks([])
fig.tight_layout()
fig.savefig("demo_box_ground_truth.png", dpi=130)

counts = label_map.counts()
print("wrote demo_box_ground_truth.png")
print(f"pixels: {counts['background']} background, {counts['object']} object, "
      f"{counts['ignore']} ignored (weight 0)")
