// Session-side view logic: candidate cards with mention highlighting,
// attribute ordering, and a controller that guarantees exactly one feedback
// request per user decision.

import {
  AttributeState,
  CandidateResponse,
  CandidateView,
  Decision,
  ServiceClient,
  SessionState,
  isDone,
} from './api';

export interface HighlightRange {
  start: number;
  end: number;
}

export interface CandidateCard {
  attribute: string;
  mention: string;
  contextSentence: string;
  highlight: HighlightRange;
  documentId: string;
  distance: number;
  nuggetId: string;
}

/** Locate the mention inside its context sentence for highlighting.
 *  The service guarantees containment; a lookup failure maps to an empty
 *  range at the start so the card still renders. */
export function highlightRange(sentence: string, mention: string): HighlightRange {
  const index = sentence.indexOf(mention);
  if (index < 0 || mention.length === 0) {
    return { start: 0, end: 0 };
  }
  return { start: index, end: index + mention.length };
}

export function toCard(attribute: string, candidate: CandidateView): CandidateCard {
  return {
    attribute,
    mention: candidate.mention,
    contextSentence: candidate.context_sentence,
    highlight: highlightRange(candidate.context_sentence, candidate.mention),
    documentId: candidate.document_id,
    distance: candidate.distance,
    nuggetId: candidate.nugget_id,
  };
}

/** "Next most urgent" tab ordering: fewest confirmed matches first, ties by
 *  name; finished attributes sink to the bottom. */
export function urgencyOrder(attributes: AttributeState[]): AttributeState[] {
  return [...attributes].sort((a, b) => {
    const doneA = a.phase === 'done' ? 1 : 0;
    const doneB = b.phase === 'done' ? 1 : 0;
    if (doneA !== doneB) return doneA - doneB;
    if (a.confirmed_count !== b.confirmed_count) {
      return a.confirmed_count - b.confirmed_count;
    }
    return a.name.localeCompare(b.name);
  });
}

export interface AttributeView {
  state: AttributeState;
  card: CandidateCard | null;
  doneReason: string | null;
}

export class SessionController {
  private pending = new Set<string>();

  constructor(
    private readonly client: ServiceClient,
    public readonly sessionId: string,
  ) {}

  async refresh(): Promise<SessionState> {
    return this.client.getSession(this.sessionId);
  }

  async attributeView(state: AttributeState): Promise<AttributeView> {
    if (state.phase === 'done') {
      return { state, card: null, doneReason: state.done_reason };
    }
    const response: CandidateResponse = await this.client.nextCandidate(
      this.sessionId,
      state.name,
    );
    if (isDone(response)) {
      return { state, card: null, doneReason: response.done };
    }
    return { state, card: toCard(state.name, response), doneReason: null };
  }

  isPending(attribute: string): boolean {
    return this.pending.has(attribute);
  }

  /** Submit one decision. While a request is in flight for the attribute,
   *  further calls are ignored, so double-clicks send a single feedback. */
  async decide(
    card: CandidateCard,
    decision: Decision,
  ): Promise<AttributeState | null> {
    if (this.pending.has(card.attribute)) {
      return null;
    }
    this.pending.add(card.attribute);
    try {
      return await this.client.submitFeedback(
        this.sessionId,
        card.attribute,
        card.nuggetId,
        decision,
      );
    } finally {
      this.pending.delete(card.attribute);
    }
  }

  exportCsv(): Promise<string> {
    return this.client.exportCsv(this.sessionId);
  }

  tableJson() {
    return this.client.getTableJson(this.sessionId);
  }
}
