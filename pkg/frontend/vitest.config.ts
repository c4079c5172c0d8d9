import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    globalSetup: "tests/globalSetup.ts",
    testTimeout: 15000,
    hookTimeout: 30000,
  },
});
