/**
 * Bridge protocol codec: length-prefixed JSON frames.
 *
 * Mirrors the service side byte for byte (see docs/bridge-protocol.md); the
 * shared golden stream under fixtures/bridge/ pins both implementations.
 */

export const PROTOCOL_VERSION = 1;
export const OUTBOUND_LIMIT = 1024 * 1024;
export const INBOUND_LIMIT = 4 * 1024 * 1024;

export interface BridgeMessage {
  type: string;
  id: number;
  body: Record<string, unknown>;
}

export class ProtocolError extends Error {}
export class TooLargeError extends Error {}

const encoder = new TextEncoder();
const decoder = new TextDecoder("utf-8", { fatal: true });

/** Canonical JSON: sorted keys, no whitespace (matches the service codec). */
function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .filter(([, v]) => v !== undefined)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
  return `{${entries.map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`).join(",")}}`;
}

export function messageToPayload(msg: BridgeMessage): Uint8Array {
  return encoder.encode(canonicalJson({ type: msg.type, id: msg.id, ...msg.body }));
}

export function messageFromPayload(payload: Uint8Array): BridgeMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(decoder.decode(payload));
  } catch (err) {
    throw new ProtocolError(`unparsable payload: ${err}`);
  }
  if (obj === null || typeof obj !== "object" || Array.isArray(obj)) {
    throw new ProtocolError("payload is not an object");
  }
  const { type, id, ...body } = obj as Record<string, unknown>;
  if (typeof type !== "string" || !type) {
    throw new ProtocolError("missing message type");
  }
  if (typeof id !== "number" || !Number.isInteger(id) || id < 0) {
    throw new ProtocolError("missing or invalid correlation id");
  }
  return { type, id, body };
}

export function encodeFrame(payload: Uint8Array, limit = OUTBOUND_LIMIT): Uint8Array {
  if (payload.length > limit) {
    throw new TooLargeError(`payload is ${payload.length} bytes, limit ${limit}`);
  }
  const framed = new Uint8Array(4 + payload.length);
  new DataView(framed.buffer).setUint32(0, payload.length, true);
  framed.set(payload, 4);
  return framed;
}

export function encodeMessage(msg: BridgeMessage, limit = OUTBOUND_LIMIT): Uint8Array {
  return encodeFrame(messageToPayload(msg), limit);
}

/** Incremental frame splitter; chunking-invariant, poisons on a bad header. */
export class FrameDecoder {
  private buffer = new Uint8Array(0);
  private poisoned = false;

  constructor(private limit = INBOUND_LIMIT) {}

  get dead(): boolean {
    return this.poisoned;
  }

  feed(data: Uint8Array): Uint8Array[] {
    if (this.poisoned) {
      throw new ProtocolError("decoder already poisoned");
    }
    const merged = new Uint8Array(this.buffer.length + data.length);
    merged.set(this.buffer);
    merged.set(data, this.buffer.length);
    this.buffer = merged;

    const payloads: Uint8Array[] = [];
    for (;;) {
      if (this.buffer.length < 4) {
        return payloads;
      }
      const view = new DataView(this.buffer.buffer, this.buffer.byteOffset);
      const length = view.getUint32(0, true);
      if (length > this.limit) {
        this.poisoned = true;
        throw new ProtocolError(`frame length ${length} exceeds inbound limit ${this.limit}`);
      }
      if (this.buffer.length < 4 + length) {
        return payloads;
      }
      payloads.push(this.buffer.slice(4, 4 + length));
      this.buffer = this.buffer.slice(4 + length);
    }
  }
}

export function decodeStream(decoderState: FrameDecoder, data: Uint8Array): BridgeMessage[] {
  return decoderState.feed(data).map(messageFromPayload);
}
