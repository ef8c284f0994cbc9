import { GameUi } from './ui.js';
import { TelemetryClient } from './telemetry.js';
import type { GameConfig } from './types.js';

async function boot(): Promise<void> {
  const root = document.getElementById('game');
  if (!root) throw new Error('missing #game container');
  const params = new URLSearchParams(window.location.search);
  const configUrl = params.get('config') ?? 'game-config.json';
  const config: GameConfig = await (await fetch(configUrl)).json();
  if (params.get('worker')) config.worker_id = params.get('worker')!;
  const telemetry = new TelemetryClient(config.telemetry_url);
  new GameUi(root, config, telemetry).start();
}

boot().catch((err) => {
  document.body.textContent = `failed to start: ${err}`;
});
