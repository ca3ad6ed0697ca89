// DOM wiring.  mountConsole builds the static frame once and re-renders the
// dynamic regions (roster list, banner, columns, evaluation) on every state
// change.  No numbers are produced here beyond reformatting response values.

import { flipRiskOf, groupEntries } from "./board.js";
import { assignmentCsv } from "./csv.js";
import type { GroupConsole } from "./console.js";
import type { Behavior, TieStrength } from "./types.js";

/** A response fraction as a display percentage, trailing zeros dropped. */
function percent(fraction: number): string {
  return `${(fraction * 100).toFixed(2).replace(/\.?0+$/, "")}%`;
}

function element<T extends HTMLElement>(root: HTMLElement, selector: string): T {
  const found = root.querySelector<T>(selector);
  if (!found) throw new Error(`missing element ${selector}`);
  return found;
}

function download(filename: string, text: string, type: string): void {
  const blob = new Blob([text], { type });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

const FRAME = `
  <section id="editor">
    <h2>Roster</h2>
    <label>Name <input id="roster-name" type="text"></label>
    <form id="person-form">
      <input id="person-id" type="text" placeholder="person id">
      <select id="person-behavior">
        <option value="non_user">non_user</option>
        <option value="user">user</option>
      </select>
      <button id="add-person" type="submit">Add person</button>
    </form>
    <form id="tie-form">
      <input id="tie-from" type="text" placeholder="from">
      <input id="tie-to" type="text" placeholder="to">
      <select id="tie-strength">
        <option value="strong">strong</option>
        <option value="weak">weak</option>
      </select>
      <button id="add-tie" type="submit">Add tie</button>
    </form>
    <p id="editor-error" class="error" hidden></p>
    <div id="roster-list"></div>
    <details>
      <summary>CSV import</summary>
      <textarea id="csv-people" placeholder="id,behavior"></textarea>
      <textarea id="csv-ties" placeholder="from,to,strength"></textarea>
      <button id="import-csv" type="button">Import</button>
      <p id="csv-counts"></p>
    </details>
    <button id="save-roster" type="button">Save roster</button>
    <button id="reload-roster" type="button">Reload</button>
  </section>
  <section id="board">
    <h2>Board</h2>
    <div id="toolbar">
      <button id="recommend" type="button">Recommend</button>
      <button id="resolve" type="button">Re-solve</button>
      <button id="reoptimize" type="button">Re-optimize</button>
      <button id="evaluate" type="button">Evaluate my grouping</button>
      <label><input id="manual-mode" type="checkbox"> manual layout</label>
      <label>seed <input id="seed" type="number" value="7"></label>
      <label>capacity <input id="cap-lo" type="number" value="3">
        to <input id="cap-hi" type="number" value="8"></label>
      <span id="link-entry">
        <input id="link-a" type="text" placeholder="id">
        <input id="link-b" type="text" placeholder="id">
        <button id="must-link" type="button">Must link</button>
        <button id="cannot-link" type="button">Cannot link</button>
      </span>
      <button id="export-csv" type="button">Export assignments CSV</button>
      <button id="export-log" type="button">Export action log</button>
    </div>
    <div id="banner" class="banner-none" hidden></div>
    <div id="columns"></div>
    <p id="absent-row" hidden></p>
    <div id="evalpanel"></div>
  </section>
`;

export function mountConsole(root: HTMLElement, ui: GroupConsole): void {
  root.innerHTML = FRAME;

  const editorError = element<HTMLParagraphElement>(root, "#editor-error");
  const rosterName = element<HTMLInputElement>(root, "#roster-name");

  const showEditorError = (message: string | null) => {
    editorError.hidden = message === null;
    editorError.textContent = message ?? "";
  };

  const renderRoster = () => {
    const list = element<HTMLDivElement>(root, "#roster-list");
    const network = ui.draft.network();
    const people = network.nodes
      .map(
        (node) =>
          `<li data-id="${node.id}">${node.id} <em>${node.behavior}</em>` +
          ` <button type="button" class="toggle-behavior" data-id="${node.id}">toggle</button>` +
          ` <button type="button" class="remove-person" data-id="${node.id}">remove</button></li>`,
      )
      .join("");
    const ties = network.ties
      .map(
        (tie) =>
          `<li>${tie.from} &rarr; ${tie.to} <em>${tie.strength}</em>` +
          ` <button type="button" class="remove-tie" data-from="${tie.from}" data-to="${tie.to}">remove</button></li>`,
      )
      .join("");
    const counts = ui.draft.counts();
    list.innerHTML =
      `<p id="roster-counts">${counts.people} people, ${counts.ties} ties</p>` +
      `<ul id="people-list">${people}</ul><ul id="ties-list">${ties}</ul>`;
  };

  const renderBanner = () => {
    const banner = element<HTMLDivElement>(root, "#banner");
    const { kind, message } = ui.state.banner;
    banner.hidden = kind === "none";
    banner.className = `banner-${kind}`;
    banner.textContent = message;
  };

  const renderColumns = () => {
    const host = element<HTMLDivElement>(root, "#columns");
    host.textContent = "";
    const seated = Object.fromEntries(
      Object.entries(ui.state.assignment).filter(
        ([id]) => !ui.state.absent.includes(id),
      ),
    );
    for (const [group, members] of groupEntries(seated)) {
      const column = document.createElement("div");
      column.className = "column";
      column.dataset.group = String(group);
      const locked = ui.state.frozenGroups.includes(group);
      const header = document.createElement("h3");
      header.textContent = `Group ${group}${locked ? " (locked)" : ""}`;
      const lock = document.createElement("button");
      lock.type = "button";
      lock.className = "lock-btn";
      lock.textContent = locked ? "locked" : "lock group";
      lock.disabled = locked;
      lock.addEventListener("click", () => void ui.lockGroup(group));
      header.append(" ", lock);
      column.append(header);
      for (const id of members) column.append(renderCard(id));
      column.addEventListener("dragover", (event) => event.preventDefault());
      column.addEventListener("drop", (event) => {
        event.preventDefault();
        const id = (event as DragEvent).dataTransfer?.getData("text/plain");
        if (id) void ui.dropCard(id, group);
      });
      host.append(column);
    }
    const absentRow = element<HTMLParagraphElement>(root, "#absent-row");
    absentRow.hidden = ui.state.absent.length === 0;
    absentRow.textContent = ui.state.absent.length
      ? `Absent: ${ui.state.absent.join(", ")}`
      : "";
  };

  const renderCard = (id: string): HTMLElement => {
    const node = ui.state.network.nodes.find((entry) => entry.id === id);
    const card = document.createElement("div");
    card.className = "card";
    card.dataset.id = id;
    card.draggable = true;
    if (ui.state.conflicts.includes(id)) card.classList.add("conflict");
    card.addEventListener("dragstart", (event) => {
      (event as DragEvent).dataTransfer?.setData("text/plain", id);
    });
    const name = document.createElement("span");
    name.className = "card-name";
    name.textContent = id;
    card.append(name);
    const tag = document.createElement("span");
    tag.className = `behavior-tag ${node?.behavior ?? ""}`;
    tag.textContent = node?.behavior ?? "?";
    card.append(tag);
    const risk = flipRiskOf(ui.state, id);
    if (risk !== null) {
      const badge = document.createElement("span");
      badge.className = risk >= 0.5 ? "flip-badge high" : "flip-badge";
      badge.textContent = percent(risk);
      badge.title = "chance this person flips behavior";
      card.append(badge);
    }
    if (id in ui.state.pinned) {
      const pin = document.createElement("button");
      pin.type = "button";
      pin.className = "pin-flag";
      pin.textContent = "pinned";
      pin.title = "click to unpin";
      pin.addEventListener("click", () => ui.unpin(id));
      card.append(pin);
    }
    const absent = document.createElement("button");
    absent.type = "button";
    absent.className = "absent-btn";
    absent.textContent = "mark absent";
    absent.addEventListener("click", () => void ui.markAbsent(id));
    card.append(absent);
    return card;
  };

  const renderEvaluation = () => {
    const panel = element<HTMLDivElement>(root, "#evalpanel");
    const evaluation = ui.state.evaluation;
    if (!evaluation) {
      panel.textContent = "";
      return;
    }
    const dirty = ui.state.dirty ? " (layout changed since scoring)" : "";
    panel.innerHTML =
      `<p id="eval-expected">Expected non-users: ${evaluation.expected_nonusers}</p>` +
      `<p id="eval-success">Success: ${percent(evaluation.success)}${dirty}</p>` +
      (ui.state.resultId !== null
        ? `<p id="eval-result">result ${ui.state.resultId} (roster v${ui.state.rosterVersion})</p>`
        : "");
  };

  const rerender = () => {
    renderRoster();
    renderBanner();
    renderColumns();
    renderEvaluation();
  };
  ui.subscribe(rerender);

  element<HTMLFormElement>(root, "#person-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const idInput = element<HTMLInputElement>(root, "#person-id");
    const behavior = element<HTMLSelectElement>(root, "#person-behavior")
      .value as Behavior;
    const result = ui.draft.addPerson(idInput.value, behavior);
    showEditorError(result.ok ? null : result.error);
    if (result.ok) idInput.value = "";
    renderRoster();
  });

  element<HTMLFormElement>(root, "#tie-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const from = element<HTMLInputElement>(root, "#tie-from");
    const to = element<HTMLInputElement>(root, "#tie-to");
    const strength = element<HTMLSelectElement>(root, "#tie-strength")
      .value as TieStrength;
    const result = ui.draft.addTie(from.value.trim(), to.value.trim(), strength);
    showEditorError(result.ok ? null : result.error);
    if (result.ok) {
      from.value = "";
      to.value = "";
    }
    renderRoster();
  });

  element<HTMLDivElement>(root, "#roster-list").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const id = target.dataset.id;
    if (target.classList.contains("toggle-behavior") && id) {
      ui.draft.toggleBehavior(id);
    } else if (target.classList.contains("remove-person") && id) {
      ui.draft.removePerson(id);
    } else if (target.classList.contains("remove-tie")) {
      ui.draft.removeTie(target.dataset.from ?? "", target.dataset.to ?? "");
    } else {
      return;
    }
    renderRoster();
  });

  element<HTMLButtonElement>(root, "#import-csv").addEventListener("click", () => {
    const people = element<HTMLTextAreaElement>(root, "#csv-people").value;
    const ties = element<HTMLTextAreaElement>(root, "#csv-ties").value;
    const result = ui.draft.importCsv(people, ties);
    const counts = element<HTMLParagraphElement>(root, "#csv-counts");
    if (result.ok) {
      counts.textContent = `imported ${result.people} people, ${result.ties} ties`;
      showEditorError(null);
    } else {
      counts.textContent = "";
      showEditorError(result.error);
    }
    renderRoster();
  });

  rosterName.addEventListener("input", () => {
    ui.draft.name = rosterName.value;
  });
  element<HTMLButtonElement>(root, "#save-roster").addEventListener("click", () => {
    void ui.saveRoster();
  });
  element<HTMLButtonElement>(root, "#reload-roster").addEventListener("click", () => {
    void ui.reloadRoster();
  });

  element<HTMLButtonElement>(root, "#recommend").addEventListener("click", () => {
    void ui.recommend();
  });
  element<HTMLButtonElement>(root, "#resolve").addEventListener("click", () => {
    void ui.recommend();
  });
  element<HTMLButtonElement>(root, "#reoptimize").addEventListener("click", () => {
    void ui.reoptimizeNow();
  });
  element<HTMLButtonElement>(root, "#evaluate").addEventListener("click", () => {
    void ui.evaluateManual();
  });
  element<HTMLInputElement>(root, "#manual-mode").addEventListener("change", (event) => {
    ui.manualMode = (event.target as HTMLInputElement).checked;
  });
  element<HTMLInputElement>(root, "#seed").addEventListener("change", (event) => {
    ui.setSeed(Number((event.target as HTMLInputElement).value));
  });
  const capacityChanged = () => {
    ui.setCapacity(
      Number(element<HTMLInputElement>(root, "#cap-lo").value),
      Number(element<HTMLInputElement>(root, "#cap-hi").value),
    );
  };
  element<HTMLInputElement>(root, "#cap-lo").addEventListener("change", capacityChanged);
  element<HTMLInputElement>(root, "#cap-hi").addEventListener("change", capacityChanged);

  element<HTMLButtonElement>(root, "#must-link").addEventListener("click", () => {
    ui.addMustLink(
      element<HTMLInputElement>(root, "#link-a").value.trim(),
      element<HTMLInputElement>(root, "#link-b").value.trim(),
    );
  });
  element<HTMLButtonElement>(root, "#cannot-link").addEventListener("click", () => {
    ui.addCannotLink(
      element<HTMLInputElement>(root, "#link-a").value.trim(),
      element<HTMLInputElement>(root, "#link-b").value.trim(),
    );
  });

  element<HTMLButtonElement>(root, "#export-csv").addEventListener("click", () => {
    download(
      "assignments.csv",
      assignmentCsv(ui.state.network, ui.state.assignment),
      "text/csv",
    );
  });
  element<HTMLButtonElement>(root, "#export-log").addEventListener("click", () => {
    download("action-log.json", ui.api.log.exportJson(), "application/json");
  });

  rerender();
}
