/**
 * COCO JSON document shapes matching the downstream store's schema subset:
 * images carry a namespaced `ctx` provenance block, annotations carry
 * uncompressed RLE segmentations, categories use the fixed id table.
 */

import { RleMask } from './rle';

export type FallLabel = 'fall' | 'non-fall';
export type SourceName = 'CAUCAFall' | 'KULeuven' | 'URFall';

export interface CocoImage {
  id: number;
  file_name: string;
  width: number;
  height: number;
  ctx: {
    label: FallLabel;
    source: SourceName;
    camera?: number;
    sequence: string;
    frame: number;
  };
}

export interface CocoAnnotation {
  id: number;
  image_id: number;
  category_id: number;
  bbox: [number, number, number, number];
  segmentation: { size: [number, number]; counts: number[] };
}

export interface CocoCategory {
  id: number;
  name: string;
}

export interface CocoDocument {
  images: CocoImage[];
  annotations: CocoAnnotation[];
  categories: CocoCategory[];
}

export function emptyDocument(): CocoDocument {
  return { images: [], annotations: [], categories: [] };
}

export function annotationFromMask(
  id: number,
  imageId: number,
  categoryId: number,
  bbox: [number, number, number, number],
  mask: RleMask,
): CocoAnnotation {
  return {
    id,
    image_id: imageId,
    category_id: categoryId,
    bbox,
    segmentation: { size: mask.size, counts: mask.counts },
  };
}
