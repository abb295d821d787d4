/** Minimal typed client for the annotation service. The UI never derives
 * boxes itself; every box comes from POST /api/derive-box so the frontend
 * and the pipeline can never disagree on geometry. */

import type {
  AnnotationFile,
  DeriveBoxRequest,
  DeriveBoxResponse,
  ImageInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function detailOf(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    /* non-JSON error body */
  }
  return `${resp.status} ${resp.statusText}`;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  imageUrl(id: string): string {
    return `${this.base}/api/images/${encodeURIComponent(id)}`;
  }

  async listImages(): Promise<ImageInfo[]> {
    const resp = await this.fetchFn(`${this.base}/api/images`);
    if (!resp.ok) throw new ApiError(resp.status, await detailOf(resp));
    return (await resp.json()) as ImageInfo[];
  }

  /** Returns null when the image has no annotation yet (404). */
  async getAnnotation(id: string): Promise<AnnotationFile | null> {
    const resp = await this.fetchFn(
      `${this.base}/api/annotations/${encodeURIComponent(id)}`,
    );
    if (resp.status === 404) return null;
    if (!resp.ok) throw new ApiError(resp.status, await detailOf(resp));
    return (await resp.json()) as AnnotationFile;
  }

  async saveAnnotation(id: string, data: AnnotationFile): Promise<void> {
    const resp = await this.fetchFn(
      `${this.base}/api/annotations/${encodeURIComponent(id)}`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(data),
      },
    );
    if (resp.status !== 204) throw new ApiError(resp.status, await detailOf(resp));
  }

  async deriveBox(request: DeriveBoxRequest): Promise<DeriveBoxResponse> {
    const resp = await this.fetchFn(`${this.base}/api/derive-box`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!resp.ok) throw new ApiError(resp.status, await detailOf(resp));
    return (await resp.json()) as DeriveBoxResponse;
  }
}
