/** Page bootstrap: canvas paint loop, panel controls, socket session. */

import { SessionClient } from "./client.js";
import {
  flushPendingMove,
  newViewState,
  onCancelGroup,
  onConfirmGroup,
  onPointerDown,
  onPointerMove,
  onPointerUp,
} from "./input.js";
import type { OpName } from "./protocol.js";
import { buildScene, Scene } from "./scene.js";
import { defaultCamera } from "./vec.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const noticeBox = document.getElementById("notices")!;
const banner = document.getElementById("banner")!;
const userBadge = document.getElementById("user-badge")!;
const strategyBadge = document.getElementById("strategy-badge")!;

const params = new URLSearchParams(window.location.search);
const serverUrl = params.get("server") ?? `ws://${window.location.hostname}:8765`;
const userName = params.get("name") ?? "guest";

const camera = defaultCamera();
const view = newViewState(0);
let scene: Scene | null = null;
let disconnected = false;

function showNotice(text: string, tone: string): void {
  const el = document.createElement("div");
  el.className = `notice ${tone}`;
  el.textContent = text;
  noticeBox.prepend(el);
  setTimeout(() => el.remove(), 6000);
}

const client = new SessionClient(serverUrl, userName, view, {
  onWelcome(welcome) {
    userBadge.textContent = `you are user ${welcome.user_id}`;
    strategyBadge.textContent = `strategy: ${welcome.strategy}`;
  },
  onViewChanged() {
    /* repaint happens in the frame loop */
  },
  onNotice(notice) {
    showNotice(notice.text, notice.tone);
  },
  onDisconnected() {
    disconnected = true;
    banner.classList.remove("hidden");
    for (const button of document.querySelectorAll("button, input")) {
      (button as HTMLButtonElement).disabled = true;
    }
  },
});

canvas.addEventListener("pointerdown", (event) => {
  if (disconnected || !scene) return;
  canvas.setPointerCapture(event.pointerId);
  const { messages } = onPointerDown(
    view,
    event.offsetX,
    event.offsetY,
    scene.projected,
    camera,
    canvas.width,
    canvas.height,
  );
  client.sendAll(messages);
});

canvas.addEventListener("pointermove", (event) => {
  if (disconnected) return;
  onPointerMove(view, event.offsetX, event.offsetY, camera, canvas.width, canvas.height);
});

canvas.addEventListener("pointerup", () => {
  if (disconnected) return;
  client.sendAll(onPointerUp(view));
});

canvas.addEventListener("wheel", (event) => {
  event.preventDefault();
  camera.distance = Math.min(12, Math.max(1.2, camera.distance * (event.deltaY > 0 ? 1.1 : 0.9)));
});

document.getElementById("confirm")!.addEventListener("click", () => {
  const messages = onConfirmGroup(view);
  if (messages.length === 0) {
    showNotice("Select vertices first.", "warn");
    return;
  }
  client.sendAll(messages);
});

document.getElementById("cancel")!.addEventListener("click", () => {
  client.sendAll(onCancelGroup(view));
});

document.getElementById("match")!.addEventListener("click", () => {
  client.send({ type: "match_check" });
});

for (const radio of document.querySelectorAll<HTMLInputElement>("input[name=op]")) {
  radio.addEventListener("change", () => {
    if (radio.checked) client.send({ type: "set_op", op: radio.value as OpName });
  });
}

function paint(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!scene) return;
  for (const prim of scene.prims) {
    if (prim.kind === "line") {
      ctx.strokeStyle = prim.stroke;
      ctx.lineWidth = prim.width;
      ctx.beginPath();
      ctx.moveTo(prim.x1, prim.y1);
      ctx.lineTo(prim.x2, prim.y2);
      ctx.stroke();
    } else {
      ctx.fillStyle = prim.fill;
      ctx.beginPath();
      ctx.arc(prim.x, prim.y, prim.r, 0, Math.PI * 2);
      ctx.fill();
      if (prim.outline) {
        ctx.strokeStyle = prim.outline;
        ctx.lineWidth = 2;
        ctx.stroke();
      }
    }
  }
}

function frame(): void {
  client.sendAll(flushPendingMove(view));
  if (view.snapshot && client.target && client.model) {
    scene = buildScene(
      view.snapshot,
      client.target,
      client.model.edges,
      view.userId,
      view.drag?.vertex ?? null,
      camera,
      canvas.width,
      canvas.height,
    );
  }
  paint();
  requestAnimationFrame(frame);
}

requestAnimationFrame(frame);
