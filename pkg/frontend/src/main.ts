// Browser bootstrap. The service base URL is the single configuration knob:
// read from ?service=... or default to same-origin port 8000.

import { ServiceClient } from './api';
import { SessionController } from './state';
import { ReviewApp } from './ui';

function serviceBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get('service') ?? `${window.location.protocol}//${window.location.hostname}:8000`;
}

async function bootstrap(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get('session');
  if (!sessionId) {
    root.textContent =
      'open with ?session=<id> (and optionally ?service=<base-url>)';
    return;
  }
  const client = new ServiceClient(serviceBaseUrl());
  const controller = new SessionController(client, sessionId);
  const app = new ReviewApp(root, controller);
  await app.render();
}

void bootstrap();
