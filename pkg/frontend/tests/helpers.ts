import { vi } from "vitest";

export interface FakeCall {
  url: string;
  init: RequestInit;
  resolve: (response: Response) => void;
  reject: (error: unknown) => void;
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Install a fetch stub whose calls resolve only when the test says so,
 * and which rejects with AbortError when the request's signal fires. */
export function installDeferredFetch(): { calls: FakeCall[] } {
  const calls: FakeCall[] = [];
  const fn = vi.fn((input: RequestInfo | URL, init: RequestInit = {}) =>
    new Promise<Response>((resolve, reject) => {
      const call: FakeCall = { url: String(input), init, resolve, reject };
      init.signal?.addEventListener("abort", () => {
        reject(new DOMException("Aborted", "AbortError"));
      });
      calls.push(call);
    }));
  vi.stubGlobal("fetch", fn);
  return { calls };
}

/** Install a fetch stub that answers immediately from a routing table. */
export function installRoutedFetch(
    route: (url: string, init: RequestInit) => Response | Promise<Response>):
    { requests: { url: string; init: RequestInit }[] } {
  const requests: { url: string; init: RequestInit }[] = [];
  const fn = vi.fn(async (input: RequestInfo | URL,
                          init: RequestInit = {}) => {
    const url = String(input);
    requests.push({ url, init });
    return route(url, init);
  });
  vi.stubGlobal("fetch", fn);
  return { requests };
}

export function flushMicrotasks(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
