import { ApiClient } from "./api";
import { AdminView } from "./admin";
import { ExamineeView } from "./examinee";
import "./styles.css";

export function bootApp(root: HTMLElement, baseUrl = ""): void {
  const api = new ApiClient(baseUrl);
  root.innerHTML = `
    <nav class="topnav">
      <a href="#/test" id="nav-test">Take a test</a>
      <a href="#/admin" id="nav-admin">Administration</a>
    </nav>
    <main id="view"></main>`;
  const view = root.querySelector<HTMLElement>("#view")!;

  const render = () => {
    if (window.location.hash.startsWith("#/admin")) {
      void new AdminView(view, api).mount();
    } else {
      void new ExamineeView(view, api).mount();
    }
  };
  window.addEventListener("hashchange", render);
  render();
}

const rootElement = document.getElementById("app");
if (rootElement) {
  bootApp(rootElement);
}
