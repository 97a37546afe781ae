import { spawnSync } from 'child_process';
import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { Detection, DetectOptions, Segmenter } from './backend';
import { RgbImage, writePng } from './png';
import { decodeRle } from './rle';

export const DETECTOR_WEIGHTS_ENV = 'GROUNDING_DINO_WEIGHTS';
export const SEGMENTER_WEIGHTS_ENV = 'SAM_WEIGHTS';
export const INFER_CMD_ENV = 'SEGADAPTER_INFER_CMD';

export class WeightsMissingError extends Error {}

/**
 * Production backend: text-prompted box detection feeding promptable
 * segmentation. Model weights live outside this package; their paths come
 * from GROUNDING_DINO_WEIGHTS and SAM_WEIGHTS. Inference itself runs in an
 * external helper process (SEGADAPTER_INFER_CMD) that receives
 *
 *     <cmd> --image <png> --labels a,b,c --box-threshold X --text-threshold Y
 *
 * plus the weight paths in its environment, and prints a JSON array of
 * {label, bbox: [x,y,w,h], mask: {size: [h,w], counts: [...]}} on stdout
 * (counts in the same column-major uncompressed RLE the output file uses).
 */
export class GroundedSamSegmenter implements Segmenter {
  readonly name = 'grounded-sam';

  constructor(private readonly env: NodeJS.ProcessEnv = process.env) {}

  private requireWeights(variable: string): string {
    const value = this.env[variable];
    if (!value) {
      throw new WeightsMissingError(
        `${variable} is not set; point it at the local weight file`,
      );
    }
    if (!fs.existsSync(value)) {
      throw new WeightsMissingError(
        `${variable}=${value} does not exist on disk`,
      );
    }
    return value;
  }

  async detect(image: RgbImage, options: DetectOptions): Promise<Detection[]> {
    this.requireWeights(DETECTOR_WEIGHTS_ENV);
    this.requireWeights(SEGMENTER_WEIGHTS_ENV);
    const command = this.env[INFER_CMD_ENV];
    if (!command) {
      throw new Error(
        `${INFER_CMD_ENV} is not set; the grounded-sam backend delegates ` +
          'inference to an external helper (see README for its contract). ' +
          'Use --backend threshold for dependency-free synthetic fixtures.',
      );
    }

    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'segadapter-'));
    const imagePath = path.join(tmp, 'input.png');
    try {
      writePng(image, imagePath);
      const result = spawnSync(
        command,
        [
          '--image', imagePath,
          '--labels', options.labels.join(','),
          '--box-threshold', String(options.boxThreshold),
          '--text-threshold', String(options.textThreshold),
        ],
        { env: this.env, encoding: 'utf-8', maxBuffer: 256 * 1024 * 1024 },
      );
      if (result.status !== 0) {
        throw new Error(
          `inference helper failed (exit ${result.status}): ${result.stderr}`,
        );
      }
      return parseHelperOutput(result.stdout, image.width, image.height);
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  }
}

interface HelperDetection {
  label: string;
  bbox: [number, number, number, number];
  mask: { size: [number, number]; counts: number[] };
}

function parseHelperOutput(
  stdout: string,
  width: number,
  height: number,
): Detection[] {
  const parsed = JSON.parse(stdout) as HelperDetection[];
  return parsed.map((entry) => {
    const [h, w] = entry.mask.size;
    if (h !== height || w !== width) {
      throw new Error(
        `helper mask size ${h}x${w} does not match image ${height}x${width}`,
      );
    }
    return {
      label: entry.label,
      bbox: entry.bbox,
      mask: decodeRle({ size: entry.mask.size, counts: entry.mask.counts }),
    };
  });
}
