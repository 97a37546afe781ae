#!/usr/bin/env node
import { parseArgs } from 'util';
import { Segmenter } from './backend';
import { AdapterJob, DEFAULT_JOB, runJob } from './annotate';
import { GroundedSamSegmenter, WeightsMissingError } from './groundedSamBackend';
import { ThresholdSegmenter } from './thresholdBackend';
import { FallLabel, SourceName } from './coco';

const USAGE = `usage: segadapter --images <dir> --out <coco.json> [options]

options:
  --images <dir>          directory of PNG images to annotate (required)
  --out <file>            output COCO JSON path (required)
  --labels <a,b,c>        text prompts (default: the 7 key objects)
  --box-threshold <x>     detection box threshold (default 0.35)
  --text-threshold <x>    detection text threshold (default 0.25)
  --allow-extra           permit labels outside the key-object vocabulary
  --backend <name>        grounded-sam (default) or threshold
  --label <fall|non-fall> provenance label stamped on images (default non-fall)
  --source <name>         provenance source: CAUCAFall, KULeuven, URFall
  --camera <n>            camera id (required iff source is KULeuven)
  --sequence <name>       sequence id (default: images directory name)
  --help                  show this message

The grounded-sam backend reads weight paths from GROUNDING_DINO_WEIGHTS and
SAM_WEIGHTS and delegates inference to SEGADAPTER_INFER_CMD; the threshold
backend needs neither and suits synthetic fixtures. A report.json sidecar
next to the output lists any skipped files.`;

function buildBackend(name: string): Segmenter {
  if (name === 'threshold') return new ThresholdSegmenter();
  if (name === 'grounded-sam') return new GroundedSamSegmenter();
  throw new Error(`unknown backend '${name}' (expected grounded-sam or threshold)`);
}

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        images: { type: 'string' },
        out: { type: 'string' },
        labels: { type: 'string' },
        'box-threshold': { type: 'string' },
        'text-threshold': { type: 'string' },
        'allow-extra': { type: 'boolean', default: false },
        backend: { type: 'string', default: 'grounded-sam' },
        label: { type: 'string', default: DEFAULT_JOB.label },
        source: { type: 'string', default: DEFAULT_JOB.source },
        camera: { type: 'string' },
        sequence: { type: 'string' },
        help: { type: 'boolean', default: false },
      },
      allowPositionals: false,
    }));
  } catch (error) {
    console.error(error instanceof Error ? error.message : String(error));
    console.error(USAGE);
    return 1;
  }

  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  if (!values.images || !values.out) {
    console.error('--images and --out are required');
    console.error(USAGE);
    return 1;
  }
  if (!['fall', 'non-fall'].includes(values.label!)) {
    console.error(`--label must be fall or non-fall, got '${values.label}'`);
    return 1;
  }
  if (!['CAUCAFall', 'KULeuven', 'URFall'].includes(values.source!)) {
    console.error(`--source must be CAUCAFall, KULeuven or URFall, got '${values.source}'`);
    return 1;
  }

  const job: AdapterJob = {
    imagesDir: values.images,
    outPath: values.out,
    labels: values.labels
      ? values.labels.split(',').map((s) => s.trim()).filter(Boolean)
      : DEFAULT_JOB.labels,
    boxThreshold: values['box-threshold']
      ? Number(values['box-threshold'])
      : DEFAULT_JOB.boxThreshold,
    textThreshold: values['text-threshold']
      ? Number(values['text-threshold'])
      : DEFAULT_JOB.textThreshold,
    allowExtra: values['allow-extra']!,
    label: values.label as FallLabel,
    source: values.source as SourceName,
    camera: values.camera !== undefined ? Number(values.camera) : undefined,
    sequence: values.sequence,
  };

  try {
    const backend = buildBackend(values.backend!);
    const report = await runJob(job, backend);
    console.error(
      `wrote ${job.outPath}: ${report.images} images, ` +
        `${report.annotations} annotations, ${report.skipped.length} skipped`,
    );
    return 0;
  } catch (error) {
    if (error instanceof WeightsMissingError) {
      console.error(`weights missing: ${error.message}`);
      return 2;
    }
    console.error(error instanceof Error ? error.message : String(error));
    return 1;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
