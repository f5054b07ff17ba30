import * as tf from "@tensorflow/tfjs";
import { setWasmPaths } from "@tensorflow/tfjs-backend-wasm";
import * as path from "node:path";

let ready: Promise<string> | null = null;

/** Prefer the WASM backend (XNNPACK); fall back to the pure-JS CPU backend. */
export function setupBackend(): Promise<string> {
  if (ready === null) {
    tf.enableProdMode();
    setWasmPaths(
      path.join(path.dirname(require.resolve("@tensorflow/tfjs-backend-wasm")), "") + path.sep
    );
    ready = tf
      .setBackend("wasm")
      .then((ok) => (ok ? "wasm" : tf.setBackend("cpu").then(() => "cpu")))
      .then(() => tf.ready())
      .then(() => tf.getBackend());
  }
  return ready;
}
