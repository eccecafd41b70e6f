/**
 * Menu view state: what the popup renders.
 *
 * Built from the service's menu_open message, updated by preview_update
 * (streaming text while the query runs, diff-highlighted runs once the
 * response is final, an error banner on failure). The menu never offers TAB
 * when the capture said the target is read-only.
 */

import { BridgeMessage } from "./protocol.js";
import { MenuModel, freshMenu } from "./keymap.js";

export interface StyledRun {
  style: "kept" | "removed" | "added";
  text: string;
}

export interface MenuViewState extends MenuModel {
  selection: string;
  appName: string;
  quickActions: string[];
  warning: string | null;
  previewRuns: StyledRun[];
  error: string | null;
}

export function openMenu(msg: BridgeMessage): MenuViewState {
  const body = msg.body as {
    selection: string;
    editable: boolean;
    warning: string | null;
    quick_actions: string[];
    app_name: string;
  };
  return {
    ...freshMenu(body.editable),
    selection: body.selection,
    appName: body.app_name,
    quickActions: body.quick_actions,
    warning: body.warning,
    previewRuns: [],
    error: null,
  };
}

export function applyPreviewUpdate(state: MenuViewState, msg: BridgeMessage): MenuViewState {
  const body = msg.body as {
    runs: StyledRun[];
    streaming: boolean;
    error: string | null;
  };
  if (body.error) {
    return { ...state, busy: false, error: body.error };
  }
  return {
    ...state,
    busy: body.streaming,
    previewing: !body.streaming && body.runs.length > 0,
    previewRuns: body.runs,
    error: null,
  };
}

export function applyMenuClose(state: MenuViewState): MenuViewState {
  return { ...state, open: false };
}

/** Plain-text preview (concatenated runs), mainly for tests and tooltips. */
export function previewText(state: MenuViewState): string {
  return state.previewRuns.map((run) => run.text).join("");
}
