/**
 * Uncompressed RLE over column-major (top-to-bottom, then left-to-right)
 * pixel order. Counts alternate zero-runs and one-runs starting with a
 * zero-run; a leading 0 appears only when the first pixel is set. This is
 * bit-compatible with the downstream dataset store.
 */

export interface RleMask {
  /** [height, width] in pixels. */
  size: [number, number];
  counts: number[];
}

/** mask is row-major boolean-ish data of length height*width. */
export function encodeRle(
  mask: Uint8Array | boolean[],
  height: number,
  width: number,
): RleMask {
  if (mask.length !== height * width) {
    throw new Error(
      `mask length ${mask.length} does not match ${height}x${width}`,
    );
  }
  const counts: number[] = [];
  let current = 0; // runs always start with zeros
  let run = 0;
  for (let x = 0; x < width; x++) {
    for (let y = 0; y < height; y++) {
      const value = mask[y * width + x] ? 1 : 0;
      if (value === current) {
        run++;
      } else {
        counts.push(run);
        current = value;
        run = 1;
      }
    }
  }
  counts.push(run);
  if (height * width === 0) {
    return { size: [height, width], counts: [] };
  }
  return { size: [height, width], counts };
}

/** Returns row-major Uint8Array of length height*width. */
export function decodeRle(rle: RleMask): Uint8Array {
  const [height, width] = rle.size;
  const total = height * width;
  const sum = rle.counts.reduce((a, b) => a + b, 0);
  if (sum !== total) {
    throw new Error(`RLE counts sum to ${sum}, expected ${total}`);
  }
  const out = new Uint8Array(total);
  let position = 0;
  let value = 0;
  for (const count of rle.counts) {
    for (let i = 0; i < count; i++) {
      const y = position % height;
      const x = Math.floor(position / height);
      out[y * width + x] = value;
      position++;
    }
    value = 1 - value;
  }
  return out;
}
