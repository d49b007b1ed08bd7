package jobs

import (
	"encoding/json"
	"log"
)

type Report struct {
	Completed int `json:"completed"`
	Failed    int `json:"failed"`
}

func LogReport(r Report) {
	log.Printf("jobs: completed=%d failed=%d", r.Completed, r.Failed)
}
