import { describe, expect, it } from "vitest";

import { encodeWav, resampleLinear } from "../src/wav.ts";

function ascii(view: DataView, offset: number, length: number): string {
  let out = "";
  for (let i = 0; i < length; i++) out += String.fromCharCode(view.getUint8(offset + i));
  return out;
}

describe("encodeWav", () => {
  it("writes a valid 16-bit mono PCM header", () => {
    const buf = encodeWav(new Float32Array([0, 0.5, -0.5, 1]), 44100);
    const view = new DataView(buf);
    expect(ascii(view, 0, 4)).toBe("RIFF");
    expect(ascii(view, 8, 4)).toBe("WAVE");
    expect(ascii(view, 12, 4)).toBe("fmt ");
    expect(view.getUint16(20, true)).toBe(1); // PCM
    expect(view.getUint16(22, true)).toBe(1); // mono
    expect(view.getUint32(24, true)).toBe(44100);
    expect(view.getUint16(34, true)).toBe(16);
    expect(ascii(view, 36, 4)).toBe("data");
    expect(view.getUint32(40, true)).toBe(8);
    expect(buf.byteLength).toBe(44 + 8);
  });

  it("quantizes samples to 16-bit", () => {
    const buf = encodeWav(new Float32Array([0, 1, -1, 0.5]), 8000);
    const view = new DataView(buf);
    expect(view.getInt16(44, true)).toBe(0);
    expect(view.getInt16(46, true)).toBe(32767);
    expect(view.getInt16(48, true)).toBe(-32767);
    expect(view.getInt16(50, true)).toBe(Math.round(0.5 * 32767));
  });

  it("clamps out-of-range samples", () => {
    const buf = encodeWav(new Float32Array([3, -3]), 8000);
    const view = new DataView(buf);
    expect(view.getInt16(44, true)).toBe(32767);
    expect(view.getInt16(46, true)).toBe(-32767);
  });
});

describe("resampleLinear", () => {
  it("is the identity at equal rates", () => {
    const input = new Float32Array([0.1, 0.2, 0.3]);
    expect(resampleLinear(input, 48000, 48000)).toBe(input);
  });

  it("halves the sample count when downsampling 2:1", () => {
    const input = new Float32Array(1000).map((_, i) => Math.sin(i / 20));
    const out = resampleLinear(input, 48000, 24000);
    expect(out.length).toBe(500);
  });

  it("interpolates linearly", () => {
    const out = resampleLinear(new Float32Array([0, 1]), 1000, 2000);
    expect(out.length).toBe(4);
    expect(out[0]).toBeCloseTo(0);
    expect(out[1]).toBeCloseTo(0.5);
    expect(out[2]).toBeCloseTo(1);
  });

  it("preserves a constant signal", () => {
    const out = resampleLinear(new Float32Array(441).fill(0.25), 44100, 48000);
    for (const v of out) expect(v).toBeCloseTo(0.25, 6);
  });
});
