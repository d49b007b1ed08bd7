"""Shared fixture repo: a small multi-package Go-like codebase with 25
seeded lint findings (7 goroutine, 6 assertion, 7 conversion, 5 import)
and a hand-written golden patch per finding.

Sources are written with 4-space indents here and converted to tabs so
the literals stay readable. Golden search/replace text goes through the
same conversion; function-body snippets get a base indent of one tab so
they splice into the fixtures byte for byte.
"""

from __future__ import annotations

import textwrap
from dataclasses import dataclass

from lintfix import LinterConfig, Workspace, run_linter


def _go(text: str) -> str:
    body = textwrap.dedent(text).strip("\n").replace("    ", "\t")
    return body + "\n"


def _block(text: str) -> str:
    """Dedented, tab-converted snippet for top-level code (no base indent)."""
    return textwrap.dedent(text).strip("\n").replace("    ", "\t")


def _body(text: str, indent: int = 1) -> str:
    """Snippet for code inside a function: one tab of base indent."""
    base = "\t" * indent
    lines = textwrap.dedent(text).strip("\n").replace("    ", "\t").split("\n")
    return "\n".join(base + line if line else line for line in lines)


def patch_text(file: str, search: str, replace: str) -> str:
    return (f"### {file}\n"
            f"<<<<<<< SEARCH\n{search}\n"
            f"=======\n{replace}\n"
            f">>>>>>> REPLACE\n")


FILES: dict[str, str] = {
    "scheduler/scheduler.go": _go('''
        package scheduler

        import (
            "context"
            "time"

            "company/logs"
        )

        type SchedulerImpl struct {
            interval time.Duration
        }

        func NewScheduler(interval time.Duration) *SchedulerImpl {
            return &SchedulerImpl{interval: interval}
        }

        func (s *SchedulerImpl) run(ctx context.Context) {
            ticker := time.NewTicker(s.interval)
            defer ticker.Stop()
            for {
                select {
                case <-ctx.Done():
                    logs.CtxInfo(ctx, "scheduler stopped")
                    return
                case <-ticker.C:
                    logs.CtxInfo(ctx, "tick")
                }
            }
        }

        func (s *SchedulerImpl) Start(ctx context.Context) error {
            go s.run(ctx)
            return nil
        }
    '''),
    "shipment/handler.go": _go('''
        package shipment

        import (
            "fmt"

            "company/eventbus"
        )

        type ShipmentContext struct {
            OrderID string
            Carrier string
        }

        func validate(sc ShipmentContext) error {
            if sc.OrderID == "" {
                return fmt.Errorf("missing order id")
            }
            return nil
        }

        func Execute(eventCtx eventbus.Event) error {
            shipmentCtx := eventCtx.(ShipmentContext)
            if err := validate(shipmentCtx); err != nil {
                return err
            }
            return nil
        }
    '''),
    "sticker/sticker.go": _go('''
        package sticker

        import (
            "strconv"
        )

        type Request struct {
            CountStr string
        }

        type Response struct {
            Count int32
        }

        func BuildResponse(req Request) Response {
            count, _ := strconv.Atoi(req.CountStr)
            return Response{Count: int32(count)}
        }
    '''),
    "workers/pool.go": _go('''
        package workers

        type Pool struct {
            queue chan string
        }

        func (p *Pool) drain() {
            for range p.queue {
            }
        }

        func notify(done chan bool) {
            done <- true
        }

        func (p *Pool) Shutdown(done chan bool) {
            go p.drain()
            go notify(done)
        }
    '''),
    "events/router.go": _go('''
        package events

        import "fmt"

        type OrderEvent struct {
            ID string
        }

        type UserEvent struct {
            Name string
        }

        func RouteOrder(payload interface{}) error {
            order := payload.(OrderEvent)
            fmt.Println(order.ID)
            return nil
        }

        func RouteUser(payload interface{}) error {
            user := payload.(*UserEvent)
            fmt.Println(user.Name)
            return nil
        }
    '''),
    "config/parse.go": _go('''
        package config

        import (
            "strconv"
        )

        type Limits struct {
            Port    int16
            Retries int8
        }

        func ParsePort(raw string) int16 {
            port, _ := strconv.Atoi(raw)
            return int16(port)
        }

        func ParseRetries(raw string) int8 {
            retries, _ := strconv.Atoi(raw)
            return int8(retries)
        }
    '''),
    "logsvc/logsvc.go": _go('''
        package logsvc

        import (
            "fmt"

            "company/metrics"
        )

        func Emit(msg string) {
            fmt.Println(msg)
        }
    '''),
    "api/server.go": _go('''
        package api

        import (
            "errors"
            "fmt"
        )

        func Greet(name string) string {
            return fmt.Sprintf("hello %s", name)
        }
    '''),
    "ingestion/consumer.go": _go('''
        package ingestion

        import "fmt"

        type Message struct {
            Body string
        }

        func handle(m Message) {
            fmt.Println(m.Body)
        }

        func process(raw interface{}) {
            msg := raw.(Message)
            handle(msg)
        }

        func Consume(raw interface{}) {
            go process(raw)
        }
    '''),
    "billing/invoice.go": _go('''
        package billing

        import (
            "strconv"
            "time"
        )

        type Invoice struct {
            Cents int32
        }

        func FromString(raw string) Invoice {
            cents, _ := strconv.Atoi(raw)
            return Invoice{Cents: int32(cents)}
        }
    '''),
    "notify/webhook.go": _go('''
        package notify

        type Hook struct {
            URL string
        }

        func send(h Hook) {
            _ = h.URL
        }

        func retry(h Hook) {
            _ = h.URL
        }

        func Dispatch(payload interface{}) {
            hook := payload.(Hook)
            go send(hook)
            go retry(hook)
        }
    '''),
    "quota/quota.go": _go('''
        package quota

        import "strconv"

        func ParseLimit(raw string) int32 {
            limit, _ := strconv.Atoi(raw)
            return int32(limit)
        }

        func ParseBurst(raw string) int8 {
            burst, _ := strconv.Atoi(raw)
            return int8(burst)
        }
    '''),
    "audit/log.go": _go('''
        package audit

        import (
            "encoding/json"
            "os"
            "strings"
        )

        func Write(entry string) {
            f, _ := os.Create("audit.log")
            _, _ = f.WriteString(entry)
        }
    '''),
    "gateway/relay.go": _go('''
        package gateway

        import "strconv"

        type Frame struct {
            Seq string
        }

        func forward(f Frame) {
            _ = f.Seq
        }

        func Relay(raw interface{}) int32 {
            frame := raw.(Frame)
            go forward(frame)
            seq, _ := strconv.Atoi(frame.Seq)
            return int32(seq)
        }
    '''),
}


@dataclass(frozen=True)
class SeededIssue:
    file: str
    rule_id: str
    target_line: str  # raw line the linter flags
    search: str
    replace: str

    @property
    def patch(self) -> str:
        return patch_text(self.file, self.search, self.replace)


def _recover_wrap(call: str, handler: str = "_ = r") -> str:
    return _body(f'''
        go func() {{
            defer func() {{
                if r := recover(); r != nil {{
                    {handler}
                }}
            }}()
            {call}
        }}()
    ''')


SEEDED: list[SeededIssue] = [
    SeededIssue(
        "scheduler/scheduler.go", "missing-recover-in-goroutine",
        "\tgo s.run(ctx)",
        "\tgo s.run(ctx)",
        _recover_wrap("s.run(ctx)",
                      'logs.CtxError(ctx, "scheduler run panic recovered: %v", r)'),
    ),
    SeededIssue(
        "shipment/handler.go", "unchecked-type-assertion",
        "\tshipmentCtx := eventCtx.(ShipmentContext)",
        "\tshipmentCtx := eventCtx.(ShipmentContext)",
        _body('''
            shipmentCtx, ok := eventCtx.(ShipmentContext)
            if !ok {
                return fmt.Errorf("type assertion failed: eventCtx is not of type ShipmentContext")
            }
        '''),
    ),
    SeededIssue(
        "sticker/sticker.go", "integer-overflow-conversion",
        "\tcount, _ := strconv.Atoi(req.CountStr)",
        _body('''
            count, _ := strconv.Atoi(req.CountStr)
            return Response{Count: int32(count)}
        '''),
        _body('''
            count, err := strconv.ParseInt(req.CountStr, 10, 32)
            if err != nil {
                return Response{Count: 0}
            }
            return Response{Count: int32(count)}
        '''),
    ),
    SeededIssue(
        "workers/pool.go", "missing-recover-in-goroutine",
        "\tgo p.drain()",
        "\tgo p.drain()",
        _recover_wrap("p.drain()"),
    ),
    SeededIssue(
        "workers/pool.go", "missing-recover-in-goroutine",
        "\tgo notify(done)",
        "\tgo notify(done)",
        _recover_wrap("notify(done)"),
    ),
    SeededIssue(
        "events/router.go", "unchecked-type-assertion",
        "\torder := payload.(OrderEvent)",
        "\torder := payload.(OrderEvent)",
        _body('''
            order, ok := payload.(OrderEvent)
            if !ok {
                return fmt.Errorf("payload is not an OrderEvent")
            }
        '''),
    ),
    SeededIssue(
        "events/router.go", "unchecked-type-assertion",
        "\tuser := payload.(*UserEvent)",
        "\tuser := payload.(*UserEvent)",
        _body('''
            user, ok := payload.(*UserEvent)
            if !ok {
                return fmt.Errorf("payload is not a UserEvent")
            }
        '''),
    ),
    SeededIssue(
        "config/parse.go", "integer-overflow-conversion",
        "\tport, _ := strconv.Atoi(raw)",
        _body('''
            port, _ := strconv.Atoi(raw)
            return int16(port)
        '''),
        _body('''
            port, err := strconv.ParseInt(raw, 10, 16)
            if err != nil {
                return 0
            }
            return int16(port)
        '''),
    ),
    SeededIssue(
        "config/parse.go", "integer-overflow-conversion",
        "\tretries, _ := strconv.Atoi(raw)",
        _body('''
            retries, _ := strconv.Atoi(raw)
            return int8(retries)
        '''),
        _body('''
            retries, err := strconv.ParseInt(raw, 10, 8)
            if err != nil {
                return 0
            }
            return int8(retries)
        '''),
    ),
    SeededIssue(
        "logsvc/logsvc.go", "unused-import",
        "\t\"company/metrics\"",
        _block('''
            import (
                "fmt"

                "company/metrics"
            )
        '''),
        _block('''
            import (
                "fmt"
            )
        '''),
    ),
    SeededIssue(
        "api/server.go", "unused-import",
        "\t\"errors\"",
        _block('''
            import (
                "errors"
                "fmt"
            )
        '''),
        _block('''
            import (
                "fmt"
            )
        '''),
    ),
    SeededIssue(
        "ingestion/consumer.go", "unchecked-type-assertion",
        "\tmsg := raw.(Message)",
        "\tmsg := raw.(Message)",
        _body('''
            msg, ok := raw.(Message)
            if !ok {
                return
            }
        '''),
    ),
    SeededIssue(
        "ingestion/consumer.go", "missing-recover-in-goroutine",
        "\tgo process(raw)",
        "\tgo process(raw)",
        _recover_wrap("process(raw)"),
    ),
    SeededIssue(
        "billing/invoice.go", "integer-overflow-conversion",
        "\tcents, _ := strconv.Atoi(raw)",
        _body('''
            cents, _ := strconv.Atoi(raw)
            return Invoice{Cents: int32(cents)}
        '''),
        _body('''
            cents, err := strconv.ParseInt(raw, 10, 32)
            if err != nil {
                return Invoice{}
            }
            return Invoice{Cents: int32(cents)}
        '''),
    ),
    SeededIssue(
        "billing/invoice.go", "unused-import",
        "\t\"time\"",
        _block('''
            import (
                "strconv"
                "time"
            )
        '''),
        _block('''
            import (
                "strconv"
            )
        '''),
    ),
    SeededIssue(
        "notify/webhook.go", "unchecked-type-assertion",
        "\thook := payload.(Hook)",
        "\thook := payload.(Hook)",
        _body('''
            hook, ok := payload.(Hook)
            if !ok {
                return
            }
        '''),
    ),
    SeededIssue(
        "notify/webhook.go", "missing-recover-in-goroutine",
        "\tgo send(hook)",
        "\tgo send(hook)",
        _recover_wrap("send(hook)"),
    ),
    SeededIssue(
        "notify/webhook.go", "missing-recover-in-goroutine",
        "\tgo retry(hook)",
        "\tgo retry(hook)",
        _recover_wrap("retry(hook)"),
    ),
    SeededIssue(
        "quota/quota.go", "integer-overflow-conversion",
        "\tlimit, _ := strconv.Atoi(raw)",
        _body('''
            limit, _ := strconv.Atoi(raw)
            return int32(limit)
        '''),
        _body('''
            limit, err := strconv.ParseInt(raw, 10, 32)
            if err != nil {
                return 0
            }
            return int32(limit)
        '''),
    ),
    SeededIssue(
        "quota/quota.go", "integer-overflow-conversion",
        "\tburst, _ := strconv.Atoi(raw)",
        _body('''
            burst, _ := strconv.Atoi(raw)
            return int8(burst)
        '''),
        _body('''
            burst, err := strconv.ParseInt(raw, 10, 8)
            if err != nil {
                return 0
            }
            return int8(burst)
        '''),
    ),
    SeededIssue(
        "audit/log.go", "unused-import",
        "\t\"encoding/json\"",
        _block('''
            import (
                "encoding/json"
                "os"
                "strings"
            )
        '''),
        _block('''
            import (
                "os"
                "strings"
            )
        '''),
    ),
    SeededIssue(
        "audit/log.go", "unused-import",
        "\t\"strings\"",
        _block('''
            import (
                "encoding/json"
                "os"
                "strings"
            )
        '''),
        _block('''
            import (
                "encoding/json"
                "os"
            )
        '''),
    ),
    SeededIssue(
        "gateway/relay.go", "unchecked-type-assertion",
        "\tframe := raw.(Frame)",
        "\tframe := raw.(Frame)",
        _body('''
            frame, ok := raw.(Frame)
            if !ok {
                return 0
            }
        '''),
    ),
    SeededIssue(
        "gateway/relay.go", "missing-recover-in-goroutine",
        "\tgo forward(frame)",
        "\tgo forward(frame)",
        _recover_wrap("forward(frame)"),
    ),
    SeededIssue(
        "gateway/relay.go", "integer-overflow-conversion",
        "\tseq, _ := strconv.Atoi(frame.Seq)",
        _body('''
            seq, _ := strconv.Atoi(frame.Seq)
            return int32(seq)
        '''),
        _body('''
            seq, err := strconv.ParseInt(frame.Seq, 10, 32)
            if err != nil {
                return 0
            }
            return int32(seq)
        '''),
    ),
]


def corpus_workspace() -> Workspace:
    return Workspace(FILES, root="corpus")


def scan_corpus(ws: Workspace | None = None):
    return run_linter(ws or corpus_workspace(), LinterConfig())


def oracle_patches(ws: Workspace | None = None) -> dict[str, str]:
    """issue_id -> golden patch text, one entry per seeded finding."""
    ws = ws or corpus_workspace()
    mapping: dict[str, str] = {}
    for issue in scan_corpus(ws):
        raw_line = ws.read(issue.file).split("\n")[issue.span.start_line - 1]
        matches = [s for s in SEEDED
                   if s.file == issue.file and s.rule_id == issue.rule_id
                   and s.target_line == raw_line]
        if len(matches) != 1:
            raise AssertionError(
                f"{issue.issue_id}: {len(matches)} golden(s) for line {raw_line!r}")
        mapping[issue.issue_id] = matches[0].patch
    if len(mapping) != len(SEEDED):
        raise AssertionError(f"{len(mapping)} scanned vs {len(SEEDED)} seeded")
    return mapping


GARBAGE_TEXT = "I could not determine a safe fix for this finding.\n"

MALFORMED_TEXT = ("### some/file.go\n"
                  "<<<<<<< SEARCH\n"
                  "dangling search with no divider or close\n")


def noop_patch(ws: Workspace, issue) -> str:
    """A patch that applies cleanly but leaves the finding in place."""
    first_line = ws.read(issue.file).split("\n")[0]
    return patch_text(issue.file, first_line, first_line + "\n\n// reviewed, no action")


def redundant_patch(ws: Workspace, issue, golden: str) -> str:
    """Golden fix plus a pointless second block (2 blocks for 1 error)."""
    return golden + "\n" + noop_patch(ws, issue)
