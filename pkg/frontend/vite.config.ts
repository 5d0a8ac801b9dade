import { defineConfig } from "vite";

// /api proxies to a locally running service during development
export default defineConfig({
  server: {
    proxy: {
      "/api": "http://127.0.0.1:8080",
    },
  },
});
