import { Api } from "./api";
import { initApp } from "./app";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}
initApp(root, new Api());
