import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 120_000,
    // tfjs holds global backend state; keep every spec in one process.
    pool: "forks",
    poolOptions: { forks: { singleFork: true } },
  },
});
