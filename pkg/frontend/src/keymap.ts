/**
 * Popup key handling: every key maps to exactly one schema-defined
 * user_action message (or a purely local effect).
 *
 * ESC closes; TAB inserts (SHIFT+TAB appends below); Enter submits
 * (SHIFT+Enter in direct mode); PageUp/PageDown scroll the preview without
 * touching the query; digits 1-5 fire quick actions only while the query
 * field is empty; everything else types into the query. TAB emits nothing
 * when the target is not editable (the button is hidden), and a retype
 * action is sent only while a preview is showing, which is when the service
 * cares.
 */

export interface KeyEvent {
  key: string;
  shiftKey?: boolean;
}

export interface UserActionBody {
  action: "quick" | "submit" | "accept" | "escape" | "retype" | "cancel";
  slot?: number;
  text?: string;
  direct?: boolean;
  append?: boolean;
}

export interface MenuModel {
  queryText: string;
  tabVisible: boolean;
  previewing: boolean;
  busy: boolean;
  scrollPos: number;
  open: boolean;
}

export function freshMenu(tabVisible: boolean): MenuModel {
  return { queryText: "", tabVisible, previewing: false, busy: false, scrollPos: 0, open: true };
}

export interface KeyOutcome {
  model: MenuModel;
  action: UserActionBody | null;
}

const QUICK_SLOTS = new Set(["1", "2", "3", "4", "5"]);

export function handleKey(model: MenuModel, event: KeyEvent): KeyOutcome {
  const key = event.key;

  if (key === "Escape") {
    return { model: { ...model, open: false }, action: { action: "escape" } };
  }
  if (key === "Tab") {
    if (!model.tabVisible) {
      return { model, action: null }; // button hidden: no way to insert
    }
    return { model, action: { action: "accept", append: Boolean(event.shiftKey) } };
  }
  if (key === "Enter") {
    const text = model.queryText.trim();
    if (!text) {
      return { model, action: null };
    }
    return {
      model: { ...model, busy: true },
      action: { action: "submit", text, direct: Boolean(event.shiftKey) },
    };
  }
  if (key === "PageUp" || key === "PageDown") {
    const delta = key === "PageUp" ? -1 : 1;
    return { model: { ...model, scrollPos: Math.max(0, model.scrollPos + delta) }, action: null };
  }
  if (key === "Backspace") {
    const queryText = model.queryText.slice(0, -1);
    return typed({ ...model, queryText });
  }
  if (QUICK_SLOTS.has(key) && model.queryText === "") {
    return { model: { ...model, busy: true }, action: { action: "quick", slot: Number(key) } };
  }
  if (key.length === 1) {
    return typed({ ...model, queryText: model.queryText + key });
  }
  return { model, action: null }; // unbound non-printable keys do nothing
}

function typed(model: MenuModel): KeyOutcome {
  if (model.previewing) {
    // Typing during a preview refines the query; the preview stays put.
    return { model, action: { action: "retype", text: model.queryText } };
  }
  return { model, action: null };
}

/** Run a scripted key sequence; returns the emitted user_action log. */
export function runKeySequence(model: MenuModel, events: KeyEvent[]): {
  model: MenuModel;
  log: UserActionBody[];
} {
  const log: UserActionBody[] = [];
  for (const event of events) {
    const outcome = handleKey(model, event);
    model = outcome.model;
    if (outcome.action) {
      log.push(outcome.action);
    }
  }
  return { model, log };
}
