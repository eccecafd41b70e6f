import { describe, expect, it } from "vitest";

import { BackgroundWindow, ChatPreloader, WindowOpener } from "../src/preload.js";

class StubOpener implements WindowOpener {
  opened: string[] = [];
  blocked = false;
  windows: StubWindow[] = [];

  open(url: string): BackgroundWindow | null {
    if (this.blocked) {
      return null;
    }
    this.opened.push(url);
    const win = new StubWindow(url);
    this.windows.push(win);
    return win;
  }
}

class StubWindow implements BackgroundWindow {
  focused = false;
  navigations: string[] = [];

  constructor(public url: string) {}

  navigate(url: string): void {
    this.url = url;
    this.navigations.push(url);
  }
}

describe("chat preloading", () => {
  it("navigates to the stored chat when a session ref exists", () => {
    const opener = new StubOpener();
    const preloader = new ChatPreloader(opener, "https://chat.mock/");
    const report = preloader.preload("abc123");
    expect(report).toEqual({ ok: true, url: "https://chat.mock/c/abc123", reused: false });
    expect(opener.windows[0]!.focused).toBe(false); // background, not foreground
  });

  it("defaults to the provider home without a ref", () => {
    const opener = new StubOpener();
    const preloader = new ChatPreloader(opener, "https://chat.mock/");
    expect(preloader.preload(null).url).toBe("https://chat.mock/");
  });

  it("reuses the existing background window", () => {
    const opener = new StubOpener();
    const preloader = new ChatPreloader(opener, "https://chat.mock/");
    preloader.preload(null);
    const second = preloader.preload("xyz");
    expect(second.reused).toBe(true);
    expect(opener.windows.length).toBe(1);
    expect(opener.windows[0]!.navigations).toEqual(["https://chat.mock/c/xyz"]);
  });

  it("reports a blocked popup", () => {
    const opener = new StubOpener();
    opener.blocked = true;
    const preloader = new ChatPreloader(opener, "https://chat.mock/");
    const report = preloader.preload(null);
    expect(report.ok).toBe(false);
    expect(report.blocked).toBe(true);
    expect(preloader.current).toBeNull();
  });
});
