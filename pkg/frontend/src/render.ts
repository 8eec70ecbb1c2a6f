// DOM construction from view models. Numbers shown in the DOM come
// straight from the view-model rows, which copy the payload fields.

import type { SessionPayload } from "./types.js";
import {
  MeshGauge,
  Scene,
  levelColor,
  meshGauge,
  statusBanner,
  turnRows,
  turnScene,
} from "./view.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBanner(session: SessionPayload): HTMLElement {
  const banner = el("div", `banner banner-${session.status}`, statusBanner(session));
  return banner;
}

export function renderGauge(gauge: MeshGauge): HTMLElement {
  const wrap = el("div", "gauge");
  const label = el(
    "span",
    "gauge-label",
    `mesh ${gauge.mesh} / bound ${gauge.bound}`,
  );
  const bar = el("div", "gauge-bar");
  const fill = el("div", "gauge-fill");
  fill.style.width = `${Math.round(gauge.fraction * 100)}%`;
  bar.appendChild(fill);
  wrap.appendChild(label);
  wrap.appendChild(bar);
  return wrap;
}

export function renderTurnList(
  session: SessionPayload,
  selected: number,
  onSelect: (index: number) => void,
): HTMLElement {
  const list = el("table", "turns");
  const head = el("tr");
  for (const title of ["turn", "r", "n", "parts", "mesh"]) {
    head.appendChild(el("th", undefined, title));
  }
  list.appendChild(head);
  turnRows(session).forEach((row, index) => {
    const tr = el("tr", index === selected ? "turn-row selected" : "turn-row");
    tr.appendChild(el("td", undefined, String(row.turn)));
    tr.appendChild(el("td", undefined, String(row.r)));
    tr.appendChild(el("td", undefined, String(row.n)));
    tr.appendChild(el("td", undefined, String(row.partCount)));
    tr.appendChild(el("td", undefined, String(row.mesh)));
    tr.addEventListener("click", () => onSelect(index));
    list.appendChild(tr);
  });
  return list;
}

function renderPoints(scene: Scene): SVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  const pad = 12;
  const scale = scene.kind === "1d" ? 9 : 22;
  const width = pad * 2 + Math.max(1, scene.width) * scale;
  const height = pad * 2 + Math.max(scene.kind === "1d" ? 2 : scene.height, 2) * scale;
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "scene");

  const byPart = new Map<number, { level: number; xs: number[]; ys: number[] }>();
  for (const mark of scene.points) {
    const entry = byPart.get(mark.part) ?? { level: mark.level, xs: [], ys: [] };
    entry.xs.push(pad + mark.x * scale);
    entry.ys.push(pad + mark.y * scale);
    byPart.set(mark.part, entry);
  }
  // part outlines first, dots on top
  for (const entry of byPart.values()) {
    const rect = document.createElementNS(SVG_NS, "rect");
    const minX = Math.min(...entry.xs) - 6;
    const minY = Math.min(...entry.ys) - 6;
    rect.setAttribute("x", String(minX));
    rect.setAttribute("y", String(minY));
    rect.setAttribute("width", String(Math.max(...entry.xs) - minX + 6));
    rect.setAttribute("height", String(Math.max(...entry.ys) - minY + 6));
    rect.setAttribute("fill", "none");
    rect.setAttribute("stroke", levelColor(entry.level));
    rect.setAttribute("stroke-width", "1.5");
    rect.setAttribute("rx", "5");
    svg.appendChild(rect);
  }
  for (const mark of scene.points) {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(pad + mark.x * scale));
    dot.setAttribute("cy", String(pad + mark.y * scale));
    dot.setAttribute("r", "3.5");
    dot.setAttribute("fill", levelColor(mark.level));
    svg.appendChild(dot);
  }
  return svg;
}

function renderBars(scene: Scene): HTMLElement {
  const wrap = el("div", "bars");
  const largest = Math.max(1, ...scene.bars.map((b) => b.size));
  for (const bar of scene.bars) {
    const row = el("div", "bar-row");
    const fill = el("div", "bar-fill", `${bar.size}`);
    fill.style.width = `${Math.max(6, (bar.size / largest) * 100)}%`;
    fill.style.background = levelColor(bar.level);
    row.appendChild(fill);
    wrap.appendChild(row);
  }
  return wrap;
}

export function renderScene(session: SessionPayload, turnIndex: number): HTMLElement {
  const wrap = el("div", "scene-wrap");
  if (turnIndex < 0 || session.turns.length === 0) {
    wrap.appendChild(el("p", "hint", "No turns yet; declare a scale to begin."));
    return wrap;
  }
  const scene = turnScene(session.turns[turnIndex].certificate);
  if (scene.kind === "abstract") {
    wrap.appendChild(el("p", "hint", "abstract family: one bar per part"));
    wrap.appendChild(renderBars(scene));
  } else {
    wrap.appendChild(renderPoints(scene));
  }
  return wrap;
}

export function renderSession(
  container: HTMLElement,
  session: SessionPayload,
  selected: number,
  onSelect: (index: number) => void,
): void {
  container.replaceChildren(
    renderBanner(session),
    renderGauge(meshGauge(session, selected)),
    renderTurnList(session, selected, onSelect),
    renderScene(session, selected),
  );
}
