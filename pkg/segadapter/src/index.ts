export { Detection, DetectOptions, Segmenter } from './backend';
export { AdapterJob, DEFAULT_JOB, JobReport, SkippedFile, runJob } from './annotate';
export {
  CocoAnnotation,
  CocoCategory,
  CocoDocument,
  CocoImage,
  FallLabel,
  SourceName,
} from './coco';
export { RgbImage, readPng, writePng } from './png';
export { RleMask, decodeRle, encodeRle } from './rle';
export { ThresholdSegmenter } from './thresholdBackend';
export {
  DETECTOR_WEIGHTS_ENV,
  GroundedSamSegmenter,
  INFER_CMD_ENV,
  SEGMENTER_WEIGHTS_ENV,
  WeightsMissingError,
} from './groundedSamBackend';
export { CATEGORY_IDS, CategoryTable, KEY_OBJECTS, isKeyObject } from './vocabulary';
