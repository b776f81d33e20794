// Package replay holds the vector-file schema and the comparison loop
// shared by the per-fixture test packages.
package replay

import (
	"encoding/json"
	"fmt"
	"os"
	"strings"
	"testing"
)

type Vector struct {
	Entry         string   `json:"entry"`
	Args          []string `json:"args"`
	Expected      string   `json:"expected"`
	ExpectedPanic bool     `json:"expectedPanic"`
}

func Load(t *testing.T, path string) []Vector {
	t.Helper()
	data, err := os.ReadFile(path)
	if err != nil {
		t.Fatalf("reading vectors: %v", err)
	}
	var vecs []Vector
	if err := json.Unmarshal(data, &vecs); err != nil {
		t.Fatalf("decoding vectors: %v", err)
	}
	if len(vecs) == 0 {
		t.Fatal("vector file is empty")
	}
	return vecs
}

// Run invokes each vector and compares the canonical rendering; a vector
// marked expectedPanic must recover from a "match failed" runtime panic.
func Run(t *testing.T, vecs []Vector, invoke func(Vector) string) {
	for i, vec := range vecs {
		vec := vec
		t.Run(fmt.Sprintf("%02d_%s", i, vec.Entry), func(t *testing.T) {
			got := ""
			panicMsg := ""
			func() {
				defer func() {
					if r := recover(); r != nil {
						panicMsg = fmt.Sprint(r)
					}
				}()
				got = invoke(vec)
			}()
			if vec.ExpectedPanic {
				if !strings.Contains(strings.ToLower(panicMsg), "match failed") {
					t.Fatalf("expected a match-failure panic, got panic=%q result=%q", panicMsg, got)
				}
				return
			}
			if panicMsg != "" {
				t.Fatalf("unexpected panic: %s", panicMsg)
			}
			if got != vec.Expected {
				t.Fatalf("replay mismatch: got %s, want %s", got, vec.Expected)
			}
		})
	}
}
