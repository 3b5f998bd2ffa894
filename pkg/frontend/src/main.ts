import { buildApp } from "./app";
import "./style.css";

const mount = document.getElementById("app");
if (mount) {
  const app = buildApp(mount);
  // start on the linked-views demo so the page is not empty
  void app.store.openSession({ demo: "linking" });
}
