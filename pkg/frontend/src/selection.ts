/**
 * Page selection extraction and response insertion.
 *
 * Context comes from the selection range's first common ancestor's parent;
 * editability follows the shared rule table. Insertion works on field values
 * (input/textarea) and contenteditable containers alike.
 */

import { ElementLike, commonAncestor, innerText } from "./dom.js";
import { editableHost, isEditableElement } from "./editability.js";

export interface PageModel {
  root: ElementLike;
  selection: PageRange | null;
  restricted?: boolean;
}

/** A selection within one element's text/value, or spanning two elements. */
export interface PageRange {
  anchor: ElementLike;
  focus: ElementLike;
  start: number; // offsets apply when anchor === focus
  end: number;
}

export interface PageSelection {
  ok: boolean;
  selectedText: string;
  contextText: string | null;
  editable: boolean;
  error?: string;
}

export class NotEditableError extends Error {}
export class PageRestrictedError extends Error {}

function rangeText(range: PageRange): string {
  if (range.anchor === range.focus) {
    const content = range.anchor.value ?? range.anchor.text;
    return content.slice(range.start, range.end);
  }
  // Cross-element selection: the covered text inside the common container.
  const container = commonAncestor(range.anchor, range.focus);
  if (!container) {
    return "";
  }
  const full = innerText(container);
  const head = innerText(range.anchor).slice(range.start);
  const tail = innerText(range.focus).slice(0, range.end);
  const from = full.indexOf(head);
  const to = full.indexOf(tail) + tail.length;
  return from >= 0 && to > from ? full.slice(from, to) : `${head}${tail}`;
}

export function extractPageSelection(page: PageModel, wantContext: boolean): PageSelection {
  if (page.restricted) {
    return {
      ok: false,
      selectedText: "",
      contextText: null,
      editable: false,
      error: "page-restricted",
    };
  }
  const range = page.selection;
  if (!range) {
    return { ok: true, selectedText: "", contextText: null, editable: false };
  }
  const host = editableHost(range.anchor);
  let contextText: string | null = null;
  if (wantContext) {
    const container = commonAncestor(range.anchor, range.focus);
    const contextNode = container?.parent ?? container ?? null;
    contextText = contextNode ? innerText(contextNode) : null;
  }
  return {
    ok: true,
    selectedText: rangeText(range),
    contextText,
    editable: host !== null,
  };
}

export type InsertMode = "replace" | "append_below";

export function insertIntoPage(page: PageModel, text: string, mode: InsertMode): number {
  if (page.restricted) {
    throw new PageRestrictedError("page is restricted");
  }
  const range = page.selection;
  if (!range || range.anchor !== range.focus) {
    throw new NotEditableError("no single-element selection to insert at");
  }
  const target = range.anchor;
  const host = editableHost(target);
  if (!host) {
    throw new NotEditableError(`<${target.tag}> does not accept text input`);
  }
  const isField = host.value !== undefined;
  const content = isField ? host.value ?? "" : host.text;
  const at = mode === "replace" ? range.start : range.end;
  const keepUntil = mode === "replace" ? range.end : range.end;
  const updated = content.slice(0, at) + text + content.slice(keepUntil);
  if (isField) {
    host.value = updated;
  } else {
    host.text = updated;
  }
  const caret = at + text.length;
  page.selection = { anchor: host, focus: host, start: caret, end: caret };
  return text.length;
}

export { isEditableElement };
