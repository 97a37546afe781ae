import { Detection, DetectOptions, Segmenter } from './backend';
import { RgbImage } from './png';

/**
 * Contrast-threshold detector for high-contrast synthetic scenes.
 *
 * Luma is split at the midpoint between its extremes; the minority side is
 * treated as objects and decomposed into 4-connected components. Every
 * component above the area floor becomes one detection carrying the first
 * prompted label (this backend has no text grounding). boxThreshold is
 * reused as the minimum normalized luma contrast for the image to contain
 * any detection at all.
 */
export class ThresholdSegmenter implements Segmenter {
  readonly name = 'threshold';

  constructor(private readonly minAreaFraction = 0.001) {}

  async detect(image: RgbImage, options: DetectOptions): Promise<Detection[]> {
    const { width, height } = image;
    const luma = new Float64Array(width * height);
    let min = Infinity;
    let max = -Infinity;
    for (let i = 0; i < width * height; i++) {
      const value =
        0.299 * image.data[i * 3] +
        0.587 * image.data[i * 3 + 1] +
        0.114 * image.data[i * 3 + 2];
      luma[i] = value;
      if (value < min) min = value;
      if (value > max) max = value;
    }
    if ((max - min) / 255 < options.boxThreshold) {
      return []; // not enough contrast to claim an object
    }

    const cut = (min + max) / 2;
    const bright = new Uint8Array(width * height);
    let brightCount = 0;
    for (let i = 0; i < width * height; i++) {
      if (luma[i] > cut) {
        bright[i] = 1;
        brightCount++;
      }
    }
    // objects are the minority side of the split
    const objectValue = brightCount * 2 <= width * height ? 1 : 0;

    const minArea = Math.max(1, Math.floor(width * height * this.minAreaFraction));
    const seen = new Uint8Array(width * height);
    const detections: Detection[] = [];
    const label = options.labels[0] ?? 'person';

    for (let start = 0; start < width * height; start++) {
      if (seen[start] || bright[start] !== objectValue) continue;
      const mask = new Uint8Array(width * height);
      const queue = [start];
      seen[start] = 1;
      let area = 0;
      let x0 = width;
      let y0 = height;
      let x1 = -1;
      let y1 = -1;
      while (queue.length > 0) {
        const index = queue.pop()!;
        mask[index] = 1;
        area++;
        const x = index % width;
        const y = Math.floor(index / width);
        if (x < x0) x0 = x;
        if (y < y0) y0 = y;
        if (x > x1) x1 = x;
        if (y > y1) y1 = y;
        const neighbors = [
          x > 0 ? index - 1 : -1,
          x < width - 1 ? index + 1 : -1,
          y > 0 ? index - width : -1,
          y < height - 1 ? index + width : -1,
        ];
        for (const next of neighbors) {
          if (next >= 0 && !seen[next] && bright[next] === objectValue) {
            seen[next] = 1;
            queue.push(next);
          }
        }
      }
      if (area >= minArea) {
        detections.push({
          label,
          bbox: [x0, y0, x1 - x0 + 1, y1 - y0 + 1],
          mask,
        });
      }
    }
    return detections;
  }
}
