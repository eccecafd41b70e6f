/**
 * Background preloading of the provider page.
 *
 * When the menu opens, the service sends open_chat; the extension opens (or
 * reuses) a background window and navigates it to the session's previous
 * chat, so a later submit pays no page-load latency. Foreground focus never
 * changes. A blocked popup is reported; submit then falls back to loading on
 * demand.
 */

export interface BackgroundWindow {
  url: string;
  focused: boolean;
  navigate(url: string): void;
}

export interface WindowOpener {
  /** Opens an unfocused window; returns null when the browser blocks it. */
  open(url: string): BackgroundWindow | null;
}

export interface PreloadReport {
  ok: boolean;
  url: string;
  reused: boolean;
  blocked?: boolean;
}

export class ChatPreloader {
  private window: BackgroundWindow | null = null;

  constructor(
    private opener: WindowOpener,
    private chatUrl: string,
  ) {}

  /** Navigate to the previous chat when a session ref exists, else home. */
  targetUrl(sessionRef: string | null): string {
    if (!sessionRef) {
      return this.chatUrl;
    }
    const base = this.chatUrl.endsWith("/") ? this.chatUrl.slice(0, -1) : this.chatUrl;
    return `${base}/c/${sessionRef}`;
  }

  preload(sessionRef: string | null): PreloadReport {
    const url = this.targetUrl(sessionRef);
    if (this.window) {
      this.window.navigate(url);
      return { ok: true, url, reused: true };
    }
    const opened = this.opener.open(url);
    if (!opened) {
      return { ok: false, url, reused: false, blocked: true };
    }
    this.window = opened;
    return { ok: true, url, reused: false };
  }

  get current(): BackgroundWindow | null {
    return this.window;
  }
}
