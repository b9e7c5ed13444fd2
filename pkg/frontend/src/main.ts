/** Browser bootstrap; kept separate from the App class so tests can
 * instantiate the app without side effects. */

import { App } from "./app.js";

const mount = document.getElementById("app");
if (mount) {
  const app = new App(mount);
  (window as unknown as { genevalApp: App }).genevalApp = app;
  void app.start();
}
