// Thin DOM layer: renders attribute tabs, candidate cards, progress, and
// the table preview. All state comes from the service on every render.

import { AttributeState, ServiceError, TableView } from './api';
import { AttributeView, SessionController, urgencyOrder } from './state';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderHighlightedSentence(view: AttributeView): HTMLElement {
  const card = view.card!;
  const sentence = card.contextSentence;
  const { start, end } = card.highlight;
  const holder = el('p', 'context');
  holder.appendChild(document.createTextNode(sentence.slice(0, start)));
  const mark = el('mark', 'mention', sentence.slice(start, end));
  holder.appendChild(mark);
  holder.appendChild(document.createTextNode(sentence.slice(end)));
  return holder;
}

function renderProgress(state: AttributeState): HTMLElement {
  const box = el('div', 'progress');
  box.appendChild(
    el('span', 'confirmed',
       `confirmed ${state.confirmed_count}/${state.confirm_threshold}`),
  );
  box.appendChild(
    el('span', 'budget',
       `interactions ${state.interactions_used}/${state.budget}`),
  );
  box.appendChild(el('span', `phase phase-${state.phase}`, state.phase));
  return box;
}

export class ReviewApp {
  private root: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly controller: SessionController,
  ) {
    this.root = root;
  }

  async render(): Promise<void> {
    const session = await this.controller.refresh();
    const ordered = urgencyOrder(session.attributes);
    this.root.replaceChildren();
    const tabs = el('div', 'attributes');
    for (const state of ordered) {
      tabs.appendChild(await this.renderAttribute(state));
    }
    this.root.appendChild(tabs);
    this.root.appendChild(this.renderTableControls(session.attributes));
  }

  private async renderAttribute(state: AttributeState): Promise<HTMLElement> {
    const section = el('section', 'attribute');
    section.appendChild(el('h2', undefined, state.name));
    section.appendChild(renderProgress(state));
    let view: AttributeView;
    try {
      view = await this.controller.attributeView(state);
    } catch (error) {
      section.appendChild(
        el('div', 'banner error',
           `service unreachable: ${String(error)} (retry below)`),
      );
      const retry = el('button', 'retry', 'Retry');
      retry.addEventListener('click', () => void this.render());
      section.appendChild(retry);
      return section;
    }
    if (view.card === null) {
      section.appendChild(
        el('div', 'banner done', `finished (${view.doneReason ?? 'done'})`),
      );
      return section;
    }
    const card = view.card;
    const cardBox = el('div', 'card');
    cardBox.appendChild(
      el('div', 'meta',
         `${card.documentId} — distance ${card.distance.toFixed(4)}`),
    );
    cardBox.appendChild(renderHighlightedSentence(view));
    const controls = el('div', 'controls');
    for (const decision of ['confirm', 'reject'] as const) {
      const button = el('button', decision, decision);
      button.addEventListener('click', async () => {
        if (this.controller.isPending(card.attribute)) return;
        button.disabled = true;
        try {
          await this.controller.decide(card, decision);
        } catch (error) {
          if (!(error instanceof ServiceError && error.status === 409)) {
            throw error;
          }
          // stale candidate: the re-render below refetches the current one
        }
        await this.render();
      });
      controls.appendChild(button);
    }
    cardBox.appendChild(controls);
    section.appendChild(cardBox);
    return section;
  }

  private renderTableControls(attributes: AttributeState[]): HTMLElement {
    const box = el('div', 'table-controls');
    const anyDone = attributes.some((a) => a.phase === 'done');
    const preview = el('button', 'preview', 'Preview table');
    const download = el('button', 'download', 'Download CSV');
    preview.disabled = !anyDone;
    download.disabled = !anyDone;
    if (!anyDone) {
      box.appendChild(
        el('span', 'hint', 'finish at least one attribute to preview the table'),
      );
    }
    preview.addEventListener('click', () => void this.renderTable(box));
    download.addEventListener('click', () => void this.downloadCsv());
    box.appendChild(preview);
    box.appendChild(download);
    return box;
  }

  private async renderTable(box: HTMLElement): Promise<void> {
    const table: TableView = await this.controller.tableJson();
    const grid = el('table', 'preview-grid');
    const head = el('tr');
    head.appendChild(el('th', undefined, 'document'));
    for (const attr of table.attributes) head.appendChild(el('th', undefined, attr));
    grid.appendChild(head);
    for (const row of table.rows) {
      const tr = el('tr');
      tr.appendChild(el('td', undefined, row.document_id));
      for (const attr of table.attributes) {
        tr.appendChild(el('td', undefined, row.cells[attr]?.value ?? ''));
      }
      grid.appendChild(tr);
    }
    box.querySelector('table')?.remove();
    box.appendChild(grid);
  }

  private async downloadCsv(): Promise<void> {
    const csv = await this.controller.exportCsv();
    const blob = new Blob([csv], { type: 'text/csv' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'table.csv';
    link.click();
    URL.revokeObjectURL(link.href);
  }
}
