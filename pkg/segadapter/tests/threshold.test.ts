import { describe, expect, it } from 'vitest';
import { RgbImage } from '../src/png';
import { ThresholdSegmenter } from '../src/thresholdBackend';

function sceneWithRectangle(
  width: number,
  height: number,
  rect: { x: number; y: number; w: number; h: number },
  background = 30,
  foreground = 220,
): RgbImage {
  const data = new Uint8Array(width * height * 3).fill(background);
  for (let y = rect.y; y < rect.y + rect.h; y++) {
    for (let x = rect.x; x < rect.x + rect.w; x++) {
      const i = (y * width + x) * 3;
      data[i] = foreground;
      data[i + 1] = foreground;
      data[i + 2] = foreground;
    }
  }
  return { width, height, data };
}

const OPTIONS = { labels: ['person'], boxThreshold: 0.35, textThreshold: 0.25 };

describe('ThresholdSegmenter', () => {
  it('detects a single high-contrast rectangle with a tight bbox', async () => {
    const rect = { x: 20, y: 10, w: 30, h: 25 };
    const image = sceneWithRectangle(100, 80, rect);
    const detections = await new ThresholdSegmenter().detect(image, OPTIONS);
    expect(detections).toHaveLength(1);
    const [detection] = detections;
    expect(detection.label).toBe('person');
    const [bx, by, bw, bh] = detection.bbox;
    expect(Math.abs(bx - rect.x)).toBeLessThanOrEqual(10);
    expect(Math.abs(by - rect.y)).toBeLessThanOrEqual(10);
    expect(Math.abs(bx + bw - (rect.x + rect.w))).toBeLessThanOrEqual(10);
    expect(Math.abs(by + bh - (rect.y + rect.h))).toBeLessThanOrEqual(10);
    const area = detection.mask.reduce((a: number, b: number) => a + b, 0);
    expect(area).toBe(rect.w * rect.h);
  });

  it('detects dark objects on bright backgrounds too', async () => {
    const image = sceneWithRectangle(60, 60, { x: 10, y: 10, w: 12, h: 12 },
                                     240, 15);
    const detections = await new ThresholdSegmenter().detect(image, OPTIONS);
    expect(detections).toHaveLength(1);
    expect(detections[0].bbox).toEqual([10, 10, 12, 12]);
  });

  it('finds one component per separated object', async () => {
    const image = sceneWithRectangle(80, 40, { x: 5, y: 5, w: 10, h: 10 });
    // add a second, disjoint rectangle
    for (let y = 25; y < 35; y++) {
      for (let x = 60; x < 75; x++) {
        const i = (y * 80 + x) * 3;
        image.data[i] = 220;
        image.data[i + 1] = 220;
        image.data[i + 2] = 220;
      }
    }
    const detections = await new ThresholdSegmenter().detect(image, OPTIONS);
    expect(detections).toHaveLength(2);
  });

  it('returns nothing on low-contrast scenes', async () => {
    const image = sceneWithRectangle(50, 50, { x: 10, y: 10, w: 8, h: 8 },
                                     128, 150);
    const detections = await new ThresholdSegmenter().detect(image, OPTIONS);
    expect(detections).toHaveLength(0);
  });
});
