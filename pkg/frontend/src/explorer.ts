// Explorer controller: fetches depth/terminal views from the server (the
// server owns all graph math), overlays coverage or live monitor state, and
// polls the monitor every two seconds while that coloring is active.

import { ApiClient } from "./api.js";
import type {
  CoverageMapping,
  CoverageReport,
  GraphDocument,
  MonitorState,
} from "./types.js";

export type ColorMode = "none" | "coverage" | "monitor";

export const MONITOR_POLL_MS = 2000;

export interface NodeDetails {
  id: string;
  label: string;
  kind: string;
  provenance: [string, string][];
  modules: string[];
}

export interface ExplorerOptions {
  depth: number;
  showTerminals: boolean;
  colorMode: ColorMode;
  mappingId: string | null;
}

export class Explorer {
  graph: GraphDocument | null = null;
  coverage: CoverageReport | null = null;
  monitorState: MonitorState | null = null;
  mapping: CoverageMapping | null = null;
  /** true when the last poll failed and the shown data may be outdated */
  stale = false;
  banner: string | null = null;
  options: ExplorerOptions = {
    depth: 4,
    showTerminals: false,
    colorMode: "none",
    mappingId: null,
  };
  onChange: (() => void) | null = null;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: ApiClient,
    public graphId: string,
  ) {}

  private notify(): void {
    this.onChange?.();
  }

  async load(): Promise<void> {
    try {
      this.graph = await this.api.getGraph(this.graphId, {
        depth: this.options.depth,
        terminals: this.options.showTerminals,
      });
      this.banner = null;
    } catch (error) {
      this.banner = `failed to load graph: ${(error as Error).message}`;
    }
    this.notify();
  }

  async setDepth(depth: number): Promise<void> {
    this.options.depth = depth;
    await this.load();
  }

  async setShowTerminals(show: boolean): Promise<void> {
    this.options.showTerminals = show;
    await this.load();
  }

  async setColorMode(mode: ColorMode, mappingId?: string): Promise<void> {
    this.options.colorMode = mode;
    if (mappingId !== undefined) {
      this.options.mappingId = mappingId;
    }
    this.stopPolling();
    this.coverage = null;
    this.monitorState = null;
    if (mode === "coverage" && this.options.mappingId) {
      try {
        this.coverage = await this.api.coverage(this.graphId, this.options.mappingId);
        this.mapping = await this.api.getMapping(this.options.mappingId);
        this.banner = null;
      } catch (error) {
        this.banner = `coverage unavailable: ${(error as Error).message}`;
      }
    } else if (mode === "monitor") {
      await this.pollMonitor(this.options.mappingId ?? undefined);
      this.startPolling();
    }
    this.notify();
  }

  /** one monitor fetch; a mapping id initializes the monitor server-side */
  async pollMonitor(mappingId?: string): Promise<void> {
    try {
      this.monitorState = await this.api.monitor(this.graphId, mappingId);
      this.stale = false;
      this.banner = null;
    } catch (error) {
      this.stale = true;
      if (!this.monitorState) {
        this.banner = `monitor unavailable: ${(error as Error).message}`;
      }
    }
    this.notify();
  }

  startPolling(): void {
    this.stopPolling();
    this.pollTimer = setInterval(() => void this.pollMonitor(), MONITOR_POLL_MS);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  async setModule(moduleName: string, state: { status: "up" | "down" } | { score: number }) {
    this.monitorState = await this.api.setModule(this.graphId, moduleName, state);
    this.notify();
  }

  dismissBanner(): void {
    this.banner = null;
    this.notify();
  }

  /** css class for a node under the active coloring */
  nodeClass(nodeId: string): string {
    const node = this.graph?.nodes.find((n) => n.id === nodeId);
    if (!node) return "node";
    if (node.kind !== "ability") return "node terminal";
    if (this.options.colorMode === "coverage" && this.coverage) {
      if (this.coverage.covered.includes(nodeId)) return "node covered";
      if (this.coverage.uncovered.includes(nodeId)) return "node uncovered";
    }
    if (this.options.colorMode === "monitor" && this.monitorState) {
      const state = this.monitorState.abilities[nodeId];
      if (state) return state.available ? "node available" : "node unavailable";
    }
    return "node";
  }

  /** heat value [0,1] for score coloring, 1 when no score applies */
  nodeScore(nodeId: string): number {
    const state = this.monitorState?.abilities[nodeId];
    return state ? state.score : 1;
  }

  details(nodeId: string): NodeDetails | null {
    const node = this.graph?.nodes.find((n) => n.id === nodeId);
    if (!node) return null;
    const modules =
      this.mapping?.modules
        .filter((m) => m.abilities.includes(nodeId))
        .map((m) => m.name) ?? [];
    return {
      id: node.id,
      label: node.label,
      kind: node.kind,
      provenance: node.provenance,
      modules,
    };
  }
}
