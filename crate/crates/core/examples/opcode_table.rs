// Prints the opcode catalog as a markdown table (the source of
// `docs/opcodes.md`).

fn main() {
    print!("{}", bbt::catalog::OpcodeCatalog::global().to_markdown());
}
