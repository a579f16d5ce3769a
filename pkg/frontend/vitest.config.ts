import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      happyDOM: {
        // same origin as the spawned play service so fetch() is allowed
        url: "http://127.0.0.1:8931/",
      },
    },
    include: ["tests/**/*.test.ts"],
    testTimeout: 40_000,
    hookTimeout: 40_000,
  },
});
