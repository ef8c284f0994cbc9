// Telemetry transport: payloads are buffered until the service acknowledges
// them, with exponential backoff between attempts.  A 201 stores, a 409 means
// the session is already stored (the retry raced a success), both count as
// acknowledged; a 422 is a client bug and is surfaced, not retried.

import { validatePayload } from './schema.js';
import type { TelemetryPayload } from './types.js';

export interface TelemetryOptions {
  /** Base delay between retries, milliseconds. */
  baseDelayMs?: number;
  /** Cap on the backoff delay. */
  maxDelayMs?: number;
  /** Give up after this many attempts (Infinity by default). */
  maxAttempts?: number;
  fetchFn?: typeof fetch;
  sleepFn?: (ms: number) => Promise<void>;
}

export type SendOutcome = 'stored' | 'duplicate' | 'invalid' | 'gave-up';

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class TelemetryClient {
  private readonly url: string;
  private readonly opts: Required<TelemetryOptions>;
  private readonly pending: TelemetryPayload[] = [];

  constructor(endpointUrl: string, options: TelemetryOptions = {}) {
    this.url = endpointUrl.replace(/\/$/, '') + '/v1/sessions';
    this.opts = {
      baseDelayMs: options.baseDelayMs ?? 500,
      maxDelayMs: options.maxDelayMs ?? 10_000,
      maxAttempts: options.maxAttempts ?? Infinity,
      fetchFn: options.fetchFn ?? fetch.bind(globalThis),
      sleepFn: options.sleepFn ?? defaultSleep,
    };
  }

  get bufferedCount(): number {
    return this.pending.length;
  }

  /** Send one session payload, retrying until acknowledged. */
  async send(payload: TelemetryPayload): Promise<SendOutcome> {
    const problems = validatePayload(payload);
    if (problems.length) {
      console.error('telemetry payload invalid, not sending:', problems);
      return 'invalid';
    }
    this.pending.push(payload);
    try {
      for (let attempt = 0; attempt < this.opts.maxAttempts; attempt++) {
        if (attempt > 0) {
          const delay = Math.min(
            this.opts.baseDelayMs * 2 ** (attempt - 1),
            this.opts.maxDelayMs,
          );
          await this.opts.sleepFn(delay);
        }
        let response: Response;
        try {
          response = await this.opts.fetchFn(this.url, {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(payload),
          });
        } catch {
          continue; // network failure: back off and retry
        }
        if (response.status === 201) return 'stored';
        if (response.status === 409) return 'duplicate';
        if (response.status === 422) {
          console.error('telemetry rejected payload:', await response.text());
          return 'invalid';
        }
        // 5xx or anything else: retry
      }
      return 'gave-up';
    } finally {
      const i = this.pending.indexOf(payload);
      if (i >= 0) this.pending.splice(i, 1);
    }
  }

  /** Fire-and-forget delivery for page unload (abandoned sessions). */
  sendBeacon(payload: TelemetryPayload): boolean {
    if (typeof navigator === 'undefined' || !navigator.sendBeacon) return false;
    const body = new Blob([JSON.stringify(payload)], { type: 'application/json' });
    return navigator.sendBeacon(this.url, body);
  }
}
