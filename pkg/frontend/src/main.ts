// Browser entry point.  The API base defaults to same-origin; a data-api
// attribute on the mount node points the console at a server elsewhere.

import { ConsoleApi } from "./api.js";
import { GroupConsole } from "./console.js";
import { mountConsole } from "./dom.js";

const root = document.querySelector<HTMLElement>("#app");
if (!root) throw new Error("missing #app mount point");
mountConsole(root, new GroupConsole(new ConsoleApi(root.dataset.api ?? "")));
