/** Typed fetch client with stale-response discarding.
 *
 * Interactions can fire requests faster than they resolve; each logical slot
 * (window payload, clusters, series) keeps a sequence number and drops
 * responses that are no longer the newest request for that slot.
 */

import type {
  ClustersPayload,
  Meta,
  Observables,
  SeriesPayload,
  WindowPayload,
} from "./types.js";

async function getJson<T>(url: string): Promise<T> {
  const r = await fetch(url);
  if (!r.ok) throw new Error(`${url}: HTTP ${r.status}`);
  return (await r.json()) as T;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  meta(): Promise<Meta> {
    return getJson(`${this.base}/api/meta`);
  }

  observables(): Promise<Observables> {
    return getJson(`${this.base}/api/observables`);
  }

  window(k: number, visibility = 0): Promise<WindowPayload> {
    return getJson(`${this.base}/api/window/${k}?visibility=${visibility}`);
  }

  clusters(k: number, threshold: number, mode: string, pinned: string): Promise<ClustersPayload> {
    const pin = pinned ? `&pinned=${encodeURIComponent(pinned)}` : "";
    return getJson(
      `${this.base}/api/window/${k}/clusters?threshold=${threshold}&mode=${encodeURIComponent(mode)}${pin}`,
    );
  }

  series(rule: number): Promise<SeriesPayload> {
    return getJson(`${this.base}/api/rule/${rule}/series`);
  }
}

/** One sequence counter per request slot; only the newest token is current. */
export class LatestGate {
  private seq = 0;

  begin(): number {
    return ++this.seq;
  }

  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}
