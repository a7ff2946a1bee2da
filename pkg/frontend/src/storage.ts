// Tiny key-value abstraction over localStorage so sessions are testable in
// node and survive reloads in the browser.

export interface KeyValueStore {
  get(key: string): string | null;
  set(key: string, value: string): void;
  remove(key: string): void;
}

export class MemoryStore implements KeyValueStore {
  private data = new Map<string, string>();

  get(key: string): string | null {
    return this.data.has(key) ? (this.data.get(key) as string) : null;
  }

  set(key: string, value: string): void {
    this.data.set(key, value);
  }

  remove(key: string): void {
    this.data.delete(key);
  }
}

export function browserStore(): KeyValueStore {
  return {
    get: (k) => window.localStorage.getItem(k),
    set: (k, v) => window.localStorage.setItem(k, v),
    remove: (k) => window.localStorage.removeItem(k),
  };
}

// The anonymous annotator token is the only identifier the client ever holds;
// it is random, client-generated, and survives reloads via the store.
export function annotatorToken(store: KeyValueStore, random: () => number = Math.random): string {
  const key = "annotator-token";
  const existing = store.get(key);
  if (existing) {
    return existing;
  }
  const token = Array.from({ length: 4 }, () =>
    Math.floor(random() * 0xffffffff)
      .toString(16)
      .padStart(8, "0")
  ).join("");
  store.set(key, token);
  return token;
}
