/**
 * Web editability rules, conservative by default.
 *
 * A target accepts pasted text only when it is an input/textarea that is
 * neither read-only nor disabled, or any element with contenteditable set.
 * Anything else (including unknown tags) is treated as read-only, which is
 * what hides the TAB button downstream. The shared table in
 * fixtures/editability_cases.json pins these rules against the native side.
 */

import { ElementLike, ancestors } from "./dom.js";

const FIELD_TAGS = new Set(["input", "textarea"]);

export function isEditableElement(node: ElementLike): boolean {
  const attrs = node.attributes;
  if (truthyAttr(attrs["contenteditable"])) {
    return true;
  }
  if (FIELD_TAGS.has(node.tag)) {
    return !truthyAttr(attrs["readonly"]) && !truthyAttr(attrs["disabled"]);
  }
  return false;
}

/** The element that would receive typed text for a selection inside `node`. */
export function editableHost(node: ElementLike): ElementLike | null {
  for (const candidate of ancestors(node)) {
    if (isEditableElement(candidate)) {
      return candidate;
    }
  }
  return null;
}

function truthyAttr(value: string | undefined): boolean {
  return value !== undefined && value !== "false";
}
