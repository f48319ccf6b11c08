import { ApiClient } from "./api";
import { App } from "./app";
import "./style.css";

const baseUrl = import.meta.env.VITE_API_BASE_URL ?? "http://127.0.0.1:8040";

const app = new App(
  new ApiClient(baseUrl),
  {
    topics: document.getElementById("topics")!,
    editor: document.getElementById("editor")!,
    results: document.getElementById("results")!,
    minimap: document.getElementById("minimap")!,
  },
  window.location.hash,
);

void app.start();
