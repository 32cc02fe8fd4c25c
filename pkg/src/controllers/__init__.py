"""Command modules registered on the lab's click group."""
