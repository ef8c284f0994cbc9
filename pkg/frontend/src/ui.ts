// Thin DOM layer over the engine: order card, staging area, box dropzone,
// robot meeting point, send button, post-game survey.

import { GameEngine } from './engine.js';
import { TelemetryClient } from './telemetry.js';
import type { GameConfig, SurveyAnswer } from './types.js';

export class GameUi {
  private engine: GameEngine;
  private timer: number | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly config: GameConfig,
    private readonly telemetry: TelemetryClient,
  ) {
    this.engine = new GameEngine(config);
  }

  start(): void {
    this.engine.start();
    this.render();
    this.timer = window.setInterval(() => this.tick(), 100);
    window.addEventListener('beforeunload', () => {
      if (!this.engine.isFinished) {
        // Abandoned: ship what we have; the service will flag it incomplete.
        this.telemetry.sendBeacon(this.engine.buildPayload(null));
      }
    });
  }

  private tick(): void {
    const wasWaiting = this.engine.robotWaiting;
    this.engine.advanceRobot();
    if (this.engine.robotWaiting !== wasWaiting) this.render();
  }

  private render(): void {
    if (this.engine.isFinished) {
      this.renderSurvey();
      return;
    }
    const order = this.config.orders[this.engine.currentOrder];
    const packed = new Set(this.engine.boxContents);
    const expected = this.engine.expectedItem;

    this.root.innerHTML = `
      <div class="order-card">
        <h2>Order ${this.engine.currentOrder + 1} of ${this.config.orders.length}</h2>
        <ol>${order.items.map((it) =>
          `<li class="${packed.has(it.id) ? 'done' : it === expected ? 'next' : ''}">
             ${it.id}${it.source === 'robot' ? ' (robot)' : ''}</li>`).join('')}
        </ol>
      </div>
      <div class="staging" id="staging"><h3>Staging area</h3></div>
      <div class="robot" id="robot"><h3>Meeting point</h3></div>
      <div class="box" id="box"><h3>Box</h3>
        <div>${this.engine.boxContents.join(', ') || 'empty'}</div>
      </div>
      <button id="send" ${this.engine.orderComplete ? '' : 'disabled'}>send</button>
    `;

    const staging = this.root.querySelector('#staging')!;
    for (const item of order.items) {
      if (packed.has(item.id) || !this.engine.isAvailable(item.id)) continue;
      const el = document.createElement('div');
      el.className = 'item';
      el.textContent = item.id;
      el.draggable = true;
      el.addEventListener('dragstart', (e) => {
        this.engine.logDragStart(item.id);
        e.dataTransfer?.setData('text/plain', item.id);
      });
      staging.appendChild(el);
    }

    const robotPane = this.root.querySelector('#robot')!;
    if (this.engine.robotWaiting && this.engine.robotCarrying) {
      const btn = document.createElement('button');
      btn.textContent = `pick up ${this.engine.robotCarrying}`;
      btn.addEventListener('click', () => {
        this.engine.pickupRobotItem();
        this.render();
      });
      robotPane.appendChild(btn);
    } else if (this.engine.robotCarrying) {
      robotPane.append(`robot en route with ${this.engine.robotCarrying}`);
    } else {
      robotPane.append('robot idle');
    }

    const box = this.root.querySelector('#box')! as HTMLElement;
    box.addEventListener('dragover', (e) => e.preventDefault());
    box.addEventListener('drop', (e) => {
      e.preventDefault();
      const id = (e as DragEvent).dataTransfer?.getData('text/plain');
      if (!id) return;
      const result = this.engine.dropOnBox(id);
      if (result === 'rejected') box.classList.add('shake');
      this.render();
    });

    this.root.querySelector('#send')!.addEventListener('click', () => {
      this.engine.send();
      this.render();
    });
  }

  private renderSurvey(): void {
    if (this.timer !== null) window.clearInterval(this.timer);
    const items = this.config.survey ?? [];
    this.root.innerHTML = `
      <div class="survey">
        <h2>All orders sent — thank you!</h2>
        <p>Please answer a few questions about the interaction.</p>
        <form id="survey-form">
          ${items.map((q) => `
            <fieldset><legend>${q.text}</legend>
              ${[1, 2, 3, 4, 5].map((v) =>
                `<label><input type="radio" name="${q.id}" value="${v}" required>${v}</label>`,
              ).join('')}
            </fieldset>`).join('')}
          <button type="submit">submit</button>
        </form>
      </div>`;
    this.root.querySelector('#survey-form')!.addEventListener('submit', async (e) => {
      e.preventDefault();
      const data = new FormData(e.target as HTMLFormElement);
      const answers: SurveyAnswer[] = items.map((q) => ({
        id: q.id,
        score: Number(data.get(q.id)),
      }));
      this.root.innerHTML = '<p>Uploading…</p>';
      const outcome = await this.telemetry.send(this.engine.buildPayload(answers));
      this.root.innerHTML = outcome === 'stored' || outcome === 'duplicate'
        ? '<p>Session recorded. You may close this tab.</p>'
        : '<p>Upload failed; please leave this tab open and try again later.</p>';
    });
  }
}
