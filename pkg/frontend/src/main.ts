import {
  ApiError,
  challengeSession,
  createSession,
  getSession,
  listFixtures,
} from "./api.js";
import { renderSession } from "./render.js";
import type { SessionPayload } from "./types.js";
import { challengeEnabled, transcriptFilename } from "./view.js";

const base = "";

interface State {
  session: SessionPayload | null;
  selectedTurn: number;
}

const state: State = { session: null, selectedTurn: -1 };

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function toast(message: string): void {
  const node = byId<HTMLDivElement>("toast");
  node.textContent = message;
  node.classList.add("visible");
  window.setTimeout(() => node.classList.remove("visible"), 4000);
}

function surface(error: unknown): void {
  if (error instanceof ApiError) {
    toast(`HTTP ${error.status}: ${error.message}`);
  } else {
    toast(String(error));
  }
}

function redraw(): void {
  const session = state.session;
  const challengeButton = byId<HTMLButtonElement>("challenge");
  const scaleInput = byId<HTMLInputElement>("scale");
  const exportButton = byId<HTMLButtonElement>("export");
  if (!session) {
    challengeButton.disabled = true;
    scaleInput.disabled = true;
    exportButton.disabled = true;
    return;
  }
  const playable = challengeEnabled(session);
  challengeButton.disabled = !playable;
  scaleInput.disabled = !playable;
  exportButton.disabled = false;
  renderSession(byId("session"), session, state.selectedTurn, (index) => {
    state.selectedTurn = index;
    redraw();
  });
}

function adopt(session: SessionPayload): void {
  state.session = session;
  state.selectedTurn = session.turns.length - 1;
  redraw();
}

async function loadFixtures(): Promise<void> {
  const select = byId<HTMLSelectElement>("fixture");
  const fixtures = await listFixtures(base);
  select.replaceChildren(
    ...fixtures.map((f) => {
      const option = document.createElement("option");
      option.value = f.name;
      const size = f.kind === "family" ? `${f.members} members` : `${f.points} points`;
      option.textContent = `${f.name} (${size})`;
      return option;
    }),
  );
}

async function onCreate(): Promise<void> {
  const fixture = byId<HTMLSelectElement>("fixture").value;
  const bound = Number(byId<HTMLInputElement>("bound").value);
  const strategy = byId<HTMLSelectElement>("strategy").value;
  try {
    const got = await createSession(base, { fixture, bound, strategy });
    adopt(got.payload);
  } catch (error) {
    surface(error);
  }
}

async function onChallenge(): Promise<void> {
  if (!state.session) return;
  const r = Number(byId<HTMLInputElement>("scale").value);
  try {
    const got = await challengeSession(base, state.session.id, r);
    adopt(got.payload);
  } catch (error) {
    surface(error);
    if (error instanceof ApiError && error.status === 409 && state.session) {
      // refresh so the finished state disables the input
      const current = await getSession(base, state.session.id);
      adopt(current.payload);
    }
  }
}

async function onExport(): Promise<void> {
  if (!state.session) return;
  try {
    // re-fetch so the saved file is byte-identical to the server's JSON
    const got = await getSession(base, state.session.id);
    const blob = new Blob([got.raw], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = transcriptFilename(got.payload);
    link.click();
    URL.revokeObjectURL(link.href);
    adopt(got.payload);
  } catch (error) {
    surface(error);
  }
}

function wire(): void {
  byId<HTMLButtonElement>("create").addEventListener("click", () => void onCreate());
  byId<HTMLButtonElement>("challenge").addEventListener("click", () => void onChallenge());
  byId<HTMLButtonElement>("export").addEventListener("click", () => void onExport());
  void loadFixtures().catch(surface);
  redraw();
}

document.addEventListener("DOMContentLoaded", wire);
