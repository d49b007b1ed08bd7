package jobs

import (
	"context"
	"log"
	"time"
)

type Runner struct {
	interval time.Duration
}

func (r *Runner) poll(ctx context.Context) {
	ticker := time.NewTicker(r.interval)
	defer ticker.Stop()
	for {
		select {
		case <-ctx.Done():
			return
		case <-ticker.C:
			log.Println("jobs: tick")
		}
	}
}

func (r *Runner) Start(ctx context.Context) {
	go r.poll(ctx)
}
