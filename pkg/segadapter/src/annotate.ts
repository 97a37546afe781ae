import * as fs from 'fs';
import * as path from 'path';
import { Segmenter } from './backend';
import {
  CocoDocument,
  FallLabel,
  SourceName,
  annotationFromMask,
  emptyDocument,
} from './coco';
import { readPng } from './png';
import { encodeRle } from './rle';
import { CategoryTable, KEY_OBJECTS } from './vocabulary';

export interface AdapterJob {
  imagesDir: string;
  outPath: string;
  labels: string[];
  boxThreshold: number;
  textThreshold: number;
  allowExtra: boolean;
  /** Provenance stamped on every image record. */
  label: FallLabel;
  source: SourceName;
  camera?: number;
  sequence?: string;
}

export interface SkippedFile {
  file: string;
  reason: string;
}

export interface JobReport {
  images: number;
  annotations: number;
  skipped: SkippedFile[];
}

export const DEFAULT_JOB: Pick<
  AdapterJob,
  'labels' | 'boxThreshold' | 'textThreshold' | 'allowExtra' | 'label' | 'source'
> = {
  labels: [...KEY_OBJECTS],
  // published defaults of the text-prompted detector
  boxThreshold: 0.35,
  textThreshold: 0.25,
  allowExtra: false,
  label: 'non-fall',
  source: 'CAUCAFall',
};

/**
 * Annotate every PNG in a directory and write one COCO JSON document.
 *
 * Files that cannot be decoded are skipped with a warning and listed in a
 * `report.json` sidecar next to the output. Image records are stamped with
 * the job's provenance; frame indices follow sorted file order so
 * (sequence, frame) stays unique.
 */
export async function runJob(
  job: AdapterJob,
  segmenter: Segmenter,
  warn: (message: string) => void = (m) => console.error(m),
): Promise<JobReport> {
  if (job.source === 'KULeuven' && job.camera === undefined) {
    throw new Error('source KULeuven requires --camera');
  }
  if (job.source !== 'KULeuven' && job.camera !== undefined) {
    throw new Error(`source ${job.source} does not take --camera`);
  }
  const table = new CategoryTable(job.allowExtra);
  for (const label of job.labels) {
    table.idFor(label); // validate the prompt list up front
  }

  const entries = fs.existsSync(job.imagesDir)
    ? fs.readdirSync(job.imagesDir).sort()
    : (() => {
        throw new Error(`images directory ${job.imagesDir} does not exist`);
      })();

  const doc: CocoDocument = emptyDocument();
  const skipped: SkippedFile[] = [];
  const sequence = job.sequence ?? path.basename(path.resolve(job.imagesDir));
  let imageId = 1;
  let annotationId = 1;

  for (const entry of entries) {
    const full = path.join(job.imagesDir, entry);
    if (!fs.statSync(full).isFile()) continue;
    if (!/\.png$/i.test(entry)) {
      skipped.push({ file: entry, reason: 'unsupported extension (PNG only)' });
      continue;
    }
    let image;
    try {
      image = readPng(full);
    } catch (error) {
      const reason = error instanceof Error ? error.message : String(error);
      warn(`skipping unreadable image ${entry}: ${reason}`);
      skipped.push({ file: entry, reason });
      continue;
    }

    doc.images.push({
      id: imageId,
      file_name: entry,
      width: image.width,
      height: image.height,
      ctx: {
        label: job.label,
        source: job.source,
        ...(job.camera !== undefined ? { camera: job.camera } : {}),
        sequence,
        frame: imageId - 1,
      },
    });

    const detections = await segmenter.detect(image, {
      labels: job.labels,
      boxThreshold: job.boxThreshold,
      textThreshold: job.textThreshold,
    });
    for (const detection of detections) {
      doc.annotations.push(
        annotationFromMask(
          annotationId++,
          imageId,
          table.idFor(detection.label),
          detection.bbox,
          encodeRle(detection.mask, image.height, image.width),
        ),
      );
    }
    imageId++;
  }

  doc.categories = table.entries();
  fs.mkdirSync(path.dirname(path.resolve(job.outPath)), { recursive: true });
  fs.writeFileSync(job.outPath, JSON.stringify(doc, null, 2) + '\n');

  const report: JobReport = {
    images: doc.images.length,
    annotations: doc.annotations.length,
    skipped,
  };
  const reportPath = path.join(path.dirname(path.resolve(job.outPath)), 'report.json');
  fs.writeFileSync(reportPath, JSON.stringify(report, null, 2) + '\n');
  return report;
}
