/** Wire types shared with the annotation service (shapes match the JSON exactly). */

export type Pt = [number, number];

export interface ImageInfo {
  id: string;
  width: number;
  height: number;
}

export interface WireBox {
  center: Pt;
  angle: number;
  half_u: number;
  half_v: number;
}

export interface ExtremePoints {
  top: Pt;
  bottom: Pt;
  left: Pt;
  right: Pt;
}

export interface AnnotationObject {
  id: number;
  orientation_clicks: [Pt, Pt];
  extreme_points: ExtremePoints;
  box: WireBox;
}

export interface AnnotationFile {
  image: string;
  width: number;
  height: number;
  objects: AnnotationObject[];
}

export interface DeriveBoxRequest {
  orientation_clicks: [Pt, Pt];
  extreme_points: ExtremePoints;
}

export interface DeriveBoxResponse {
  box: WireBox;
  object_center: Pt;
  corners: Pt[];
}

export const EXTREME_LABELS = ["top", "bottom", "left", "right"] as const;
export type ExtremeLabel = (typeof EXTREME_LABELS)[number];
