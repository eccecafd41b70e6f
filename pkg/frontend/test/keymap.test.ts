/** Popup key-mapping snapshot: scripted sequences -> exact action logs. */

import { describe, expect, it } from "vitest";

import { KeyEvent, freshMenu, handleKey, runKeySequence } from "../src/keymap.js";

const chars = (text: string): KeyEvent[] => [...text].map((key) => ({ key }));

describe("key-mapping snapshot (acceptance)", () => {
  it("reproduces the expected action log for a full editable-target session", () => {
    let model = freshMenu(true);

    // Quick action 2 from the empty query field.
    const first = runKeySequence(model, [{ key: "2" }]);
    model = first.model;

    // A preview arrived; the user refines by typing and resubmits, then
    // appends with SHIFT+TAB and closes with ESC.
    model = { ...model, previewing: true, busy: false };
    const second = runKeySequence(model, [
      ...chars("shorter"),
      { key: "Enter" },
      { key: "Tab", shiftKey: true },
      { key: "Escape" },
    ]);

    expect([...first.log, ...second.log]).toEqual([
      { action: "quick", slot: 2 },
      { action: "retype", text: "s" },
      { action: "retype", text: "sh" },
      { action: "retype", text: "sho" },
      { action: "retype", text: "shor" },
      { action: "retype", text: "short" },
      { action: "retype", text: "shorte" },
      { action: "retype", text: "shorter" },
      { action: "submit", text: "shorter", direct: false },
      { action: "accept", append: true },
      { action: "escape" },
    ]);
  });

  it("never emits accept while TAB is hidden (read-only target)", () => {
    const model = { ...freshMenu(false), previewing: true };
    const { log } = runKeySequence(model, [
      { key: "Tab" },
      { key: "Tab", shiftKey: true },
      { key: "Escape" },
    ]);
    expect(log).toEqual([{ action: "escape" }]);
  });

  it("SHIFT+Enter submits in direct mode", () => {
    const { log } = runKeySequence(freshMenu(true), [
      ...chars("haiku please"),
      { key: "Enter", shiftKey: true },
    ]);
    expect(log).toEqual([{ action: "submit", text: "haiku please", direct: true }]);
  });

  it("digits type into a non-empty query instead of firing quick actions", () => {
    const { model, log } = runKeySequence(freshMenu(true), [...chars("top"), { key: "3" }]);
    expect(log).toEqual([]);
    expect(model.queryText).toBe("top3");
  });

  it("page keys scroll the preview without touching the query", () => {
    let model = { ...freshMenu(true), queryText: "keep me" };
    const down = handleKey(model, { key: "PageDown" });
    expect(down.action).toBeNull();
    expect(down.model.scrollPos).toBe(1);
    expect(down.model.queryText).toBe("keep me");
    const up = handleKey(down.model, { key: "PageUp" });
    expect(up.model.scrollPos).toBe(0);
  });

  it("enter with an empty query does nothing", () => {
    const { log } = runKeySequence(freshMenu(true), [{ key: "Enter" }]);
    expect(log).toEqual([]);
  });

  it("backspace edits and re-sends retype while previewing", () => {
    const model = { ...freshMenu(true), queryText: "abc", previewing: true };
    const outcome = handleKey(model, { key: "Backspace" });
    expect(outcome.model.queryText).toBe("ab");
    expect(outcome.action).toEqual({ action: "retype", text: "ab" });
  });
});
