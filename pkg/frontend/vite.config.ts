import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    port: 5173,
    // During development the API runs separately; proxy it so the app can
    // use same-origin requests.
    proxy: {
      "/sessions": "http://127.0.0.1:8000",
      "/admin": "http://127.0.0.1:8000",
      "/healthz": "http://127.0.0.1:8000",
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
