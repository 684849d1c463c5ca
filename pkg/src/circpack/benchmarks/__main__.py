from circpack.benchmarks import HERE, write_fixtures

write_fixtures(HERE)
print(f"wrote benchmark fixtures to {HERE}")
