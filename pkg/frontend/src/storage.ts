/** Key-value persistence behind session state and the retry queue.
 *
 * The browser build uses localStorage; tests use the in-memory store. Both
 * survive only what their medium survives -- the contract here is just
 * synchronous get/set/remove of strings.
 */

export interface KeyValueStore {
  get(key: string): string | null;
  set(key: string, value: string): void;
  remove(key: string): void;
}

export class MemoryStore implements KeyValueStore {
  private readonly data = new Map<string, string>();

  get(key: string): string | null {
    return this.data.has(key) ? this.data.get(key)! : null;
  }

  set(key: string, value: string): void {
    this.data.set(key, value);
  }

  remove(key: string): void {
    this.data.delete(key);
  }
}

export class BrowserStore implements KeyValueStore {
  get(key: string): string | null {
    return window.localStorage.getItem(key);
  }

  set(key: string, value: string): void {
    window.localStorage.setItem(key, value);
  }

  remove(key: string): void {
    window.localStorage.removeItem(key);
  }
}
