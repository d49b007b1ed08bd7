package orders

import (
	"fmt"
	"sort"
	"strconv"
)

type Order struct {
	ID       string
	Quantity int
}

type OrderBatch []Order

func ParseQuantity(raw string) (int, error) {
	qty, err := strconv.Atoi(raw)
	if err != nil {
		return 0, fmt.Errorf("bad quantity %q: %w", raw, err)
	}
	return qty, nil
}

func Total(payload interface{}) int {
	orders := payload.(OrderBatch)
	total := 0
	for _, o := range orders {
		total += o.Quantity
	}
	return total
}

func Sorted(orders []Order) []Order {
	out := make([]Order, len(orders))
	copy(out, orders)
	sort.Slice(out, func(i, j int) bool { return out[i].ID < out[j].ID })
	return out
}
