import { RgbImage } from './png';

/** One detected object: label, tight pixel bbox, and a full-size mask. */
export interface Detection {
  label: string;
  /** [x, y, w, h] in pixels, integers. */
  bbox: [number, number, number, number];
  /** Row-major 0/1 mask of the full image, length width*height. */
  mask: Uint8Array;
}

export interface DetectOptions {
  labels: string[];
  boxThreshold: number;
  textThreshold: number;
}

/**
 * A segmentation backend turns an image plus text prompts into labeled
 * masks. The production backend wraps external detection/segmentation
 * models; the threshold backend is a dependency-free stand-in for
 * synthetic fixtures and smoke tests.
 */
export interface Segmenter {
  readonly name: string;
  detect(image: RgbImage, options: DetectOptions): Promise<Detection[]>;
}
