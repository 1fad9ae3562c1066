// Row-major run-length codec for binary masks, matching the engine's wire
// format: runs alternate starting with zeros (a leading 0 means the mask
// begins with a set pixel), and must sum to w*h.

import type { RleMask } from "./types.js";

export function decodeRle(mask: RleMask): Uint8Array {
  const total = mask.w * mask.h;
  const bits = new Uint8Array(total);
  let pos = 0;
  let value = 0;
  for (const run of mask.rle) {
    if (run < 0) throw new Error(`negative run length ${run}`);
    if (value === 1) bits.fill(1, pos, pos + run);
    pos += run;
    value = 1 - value;
  }
  if (pos !== total) {
    throw new Error(`run lengths sum to ${pos}, expected ${total}`);
  }
  return bits;
}

export function encodeRle(bits: Uint8Array, w: number, h: number): RleMask {
  if (bits.length !== w * h) {
    throw new Error(`bit array length ${bits.length}, expected ${w * h}`);
  }
  const rle: number[] = [];
  let current = 0;
  let length = 0;
  for (const bit of bits) {
    if (bit === current) {
      length += 1;
    } else {
      rle.push(length);
      current = bit;
      length = 1;
    }
  }
  rle.push(length);
  return { w, h, rle };
}

export function countSet(bits: Uint8Array): number {
  let n = 0;
  for (const b of bits) n += b;
  return n;
}
