/**
 * Drive a provider's chat page: inject the query, submit it, poll the output
 * element for changes, and signal completion after a quiet window.
 *
 * Each observed change is forwarded as a full-content response_chunk; once
 * nothing has changed for `quietMs` the driver emits response_done. If a
 * stored element descriptor stops resolving, rediscovery runs; below the
 * score threshold the driver reports rediscovery_failed and fails the
 * request. Timers come from the global scheduler, so tests drive the whole
 * thing with fake timers.
 */

import { BridgeMessage } from "./protocol.js";
import { ElementLike, dispatch, innerText, walk } from "./dom.js";
import {
  ElementDescriptor,
  describe,
  rediscover,
  resolveDescriptor,
} from "./rediscover.js";

export interface ProviderSelectors {
  provider: string;
  chatUrl: string;
  input: ElementDescriptor;
  output: ElementDescriptor;
  submit: { kind: "return" } | { kind: "click"; button: ElementDescriptor };
}

export interface ChatPageModel {
  root: ElementLike;
}

export interface DriveOptions {
  pollMs?: number;
  quietMs?: number;
  hardTimeoutMs?: number;
  /** Called when rediscovery adopts replacement descriptors. */
  onSelectorsAdopted?: (selectors: ProviderSelectors) => void;
}

const DEFAULTS = { pollMs: 150, quietMs: 1000, hardTimeoutMs: 120_000 };

interface ElementHandle {
  node: ElementLike;
  descriptor: ElementDescriptor;
}

function locate(
  page: ChatPageModel,
  descriptor: ElementDescriptor,
): { handle: ElementHandle | null; adopted: boolean } {
  const exact = resolveDescriptor(page.root, descriptor);
  if (exact) {
    return { handle: { node: exact, descriptor }, adopted: false };
  }
  const recovered = rediscover(page.root, descriptor);
  if (recovered.element) {
    return {
      handle: { node: recovered.element, descriptor: describe(recovered.element) },
      adopted: true,
    };
  }
  return { handle: null, adopted: false };
}

/**
 * Returns a cancel function. All messages (response_chunk / response_done /
 * response_failed / rediscovery_failed) go through `emit` with the given id.
 */
export function driveChat(
  page: ChatPageModel,
  selectors: ProviderSelectors,
  prompt: string,
  requestId: number,
  emit: (msg: BridgeMessage) => void,
  options: DriveOptions = {},
): () => void {
  const opts = { ...DEFAULTS, ...options };
  let timer: ReturnType<typeof setTimeout> | null = null;
  let finished = false;

  const fail = (kind: string, detail: string) => {
    if (!finished) {
      finished = true;
      emit({ type: "response_failed", id: requestId, body: { kind, detail } });
    }
  };

  const stop = () => {
    finished = true;
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
  };

  // -- locate the input element (rediscovering if the page changed) --------
  const input = locate(page, selectors.input);
  let liveSelectors = selectors;
  if (!input.handle) {
    emit({
      type: "rediscovery_failed",
      id: requestId,
      body: { provider: selectors.provider, missing: "input" },
    });
    fail("submit-failed", "input element not found");
    return stop;
  }
  if (input.adopted) {
    liveSelectors = { ...liveSelectors, input: input.handle.descriptor };
    opts.onSelectorsAdopted?.(liveSelectors);
  }

  // -- inject the prompt with user-interaction pre-events ----------------
  const inputNode = input.handle.node;
  dispatch(inputNode, "focus");
  dispatch(inputNode, "keydown");
  if (inputNode.value !== undefined) {
    inputNode.value = prompt;
  } else {
    inputNode.text = prompt;
  }
  dispatch(inputNode, "input");

  // -- submit ------------------------------------------------------------
  if (liveSelectors.submit.kind === "return") {
    dispatch(inputNode, "keydown:Enter");
  } else {
    const button = resolveDescriptor(page.root, liveSelectors.submit.button);
    if (!button) {
      fail("submit-failed", "submit button not found");
      return stop;
    }
    dispatch(button, "click");
  }

  // -- poll the output element -------------------------------------------
  let lastContent: string | null = null;
  let lastChangeAt = 0;
  let elapsed = 0;

  const tick = () => {
    if (finished) {
      return;
    }
    elapsed += opts.pollMs;
    if (elapsed >= opts.hardTimeoutMs) {
      fail("hard-timeout", "response never went quiet");
      stop();
      return;
    }
    const output = locate(page, liveSelectors.output);
    if (!output.handle) {
      emit({
        type: "rediscovery_failed",
        id: requestId,
        body: { provider: liveSelectors.provider, missing: "output" },
      });
      fail("submit-failed", "output element lost");
      stop();
      return;
    }
    if (output.adopted) {
      liveSelectors = { ...liveSelectors, output: output.handle.descriptor };
      opts.onSelectorsAdopted?.(liveSelectors);
    }
    const content = innerText(output.handle.node);
    if (content !== (lastContent ?? "")) {
      lastContent = content;
      lastChangeAt = elapsed;
      emit({ type: "response_chunk", id: requestId, body: { content } });
    } else if (lastContent !== null && elapsed - lastChangeAt >= opts.quietMs) {
      finished = true;
      emit({ type: "response_done", id: requestId, body: { content: lastContent } });
      stop();
      return;
    }
    timer = setTimeout(tick, opts.pollMs);
  };

  timer = setTimeout(tick, opts.pollMs);
  return stop;
}

export { describe, rediscover, resolveDescriptor, walk };
