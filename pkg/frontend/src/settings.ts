/**
 * Extension settings: provider selector configurations.
 *
 * Selector sets for live commercial chat UIs ship as editable data, not as
 * tested behavior — third-party markup is unstable, so automated tests run
 * against the bundled mock chat pages only, and users can add or fix
 * providers by editing these entries (or via the manual element picker).
 */

import { ProviderSelectors } from "./chatdriver.js";

export interface ExtensionSettings {
  providers: Record<string, ProviderSelectors>;
  pollMs: number;
  quietMs: number;
  hardTimeoutMs: number;
}

export const DEFAULT_SETTINGS: ExtensionSettings = {
  pollMs: 150,
  quietMs: 1000,
  hardTimeoutMs: 120_000,
  providers: {
    default: {
      provider: "default",
      chatUrl: "https://chat.example.com/",
      input: { tag: "textarea", id: "prompt-input", classes: ["prompt"], path: [0, 0] },
      output: { tag: "div", id: "", classes: ["response", "markdown"], path: [0, 1] },
      submit: { kind: "return" },
    },
  },
};

export function mergeSettings(
  base: ExtensionSettings,
  overrides: Partial<ExtensionSettings>,
): ExtensionSettings {
  return {
    ...base,
    ...overrides,
    providers: { ...base.providers, ...(overrides.providers ?? {}) },
  };
}
