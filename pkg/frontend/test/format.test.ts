import { describe, expect, it } from "vitest";

import { escapeHtml, humanAge, humanBytes, humanDuration } from "../src/format.js";

describe("humanDuration", () => {
  it("renders seconds, minutes, hours", () => {
    expect(humanDuration(12)).toBe("12s");
    expect(humanDuration(612)).toBe("10m 12s");
    expect(humanDuration(600)).toBe("10m");
    expect(humanDuration(7320)).toBe("2h 2m");
  });

  it("clamps negatives", () => {
    expect(humanDuration(-5)).toBe("0s");
  });
});

describe("humanAge", () => {
  it("handles never-seen", () => {
    expect(humanAge(100, null)).toBe("never");
    expect(humanAge(100, 40)).toBe("1m ago");
  });
});

describe("humanBytes", () => {
  it("scales units", () => {
    expect(humanBytes(512)).toBe("512 B");
    expect(humanBytes(2048)).toBe("2.0 KiB");
    expect(humanBytes(5 * 1024 * 1024)).toBe("5.0 MiB");
  });
});

describe("escapeHtml", () => {
  it("neutralizes markup", () => {
    expect(escapeHtml(`<img src=x onerror="pwn()">`)).toBe(
      "&lt;img src=x onerror=&quot;pwn()&quot;&gt;",
    );
  });
});
