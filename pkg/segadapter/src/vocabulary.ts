/** Closed key-object vocabulary with fixed category ids (1..7, in order). */

export const KEY_OBJECTS = [
  'person',
  'chair',
  'table',
  'bed',
  'wheelchair',
  'floor',
  'walker',
] as const;

export type KeyObject = (typeof KEY_OBJECTS)[number];

export const CATEGORY_IDS: ReadonlyMap<string, number> = new Map(
  KEY_OBJECTS.map((name, index) => [name, index + 1]),
);

export function isKeyObject(label: string): label is KeyObject {
  return CATEGORY_IDS.has(label);
}

/**
 * Deterministic id for a label: key objects keep their fixed ids; extra
 * labels (only allowed with --allow-extra) get ids 8.. in first-seen order.
 */
export class CategoryTable {
  private readonly ids = new Map<string, number>();
  private nextExtra = KEY_OBJECTS.length + 1;

  constructor(private readonly allowExtra: boolean) {}

  idFor(label: string): number {
    const fixed = CATEGORY_IDS.get(label);
    if (fixed !== undefined) {
      this.ids.set(label, fixed);
      return fixed;
    }
    if (!this.allowExtra) {
      throw new Error(
        `label '${label}' is outside the key-object vocabulary ` +
          `(${KEY_OBJECTS.join(', ')}); pass --allow-extra to permit it`,
      );
    }
    let id = this.ids.get(label);
    if (id === undefined) {
      id = this.nextExtra++;
      this.ids.set(label, id);
    }
    return id;
  }

  /** Categories actually used, ordered by id. */
  entries(): Array<{ id: number; name: string }> {
    return [...this.ids.entries()]
      .map(([name, id]) => ({ id, name }))
      .sort((a, b) => a.id - b.id);
  }
}
