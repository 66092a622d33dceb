/** Dimension toasts: one per dimension name, announced as dimensions land. */

export class ToastTray {
  private readonly root: HTMLElement;

  constructor(container: HTMLElement, private readonly autoDismissMs = 4000) {
    this.root = container.ownerDocument.createElement('div');
    this.root.className = 'toast-tray';
    container.appendChild(this.root);
  }

  announceDimension(name: string): void {
    const toast = this.root.ownerDocument.createElement('div');
    toast.className = 'toast';
    toast.dataset.dimension = name;
    toast.textContent = `New dimension: ${name}`;
    this.root.appendChild(toast);
    if (this.autoDismissMs > 0) {
      setTimeout(() => toast.remove(), this.autoDismissMs);
    }
  }

  announceNotice(text: string): void {
    const toast = this.root.ownerDocument.createElement('div');
    toast.className = 'toast toast-notice';
    toast.textContent = text;
    this.root.appendChild(toast);
    if (this.autoDismissMs > 0) {
      setTimeout(() => toast.remove(), this.autoDismissMs);
    }
  }

  get dimensionToasts(): string[] {
    return Array.from(this.root.querySelectorAll<HTMLElement>('.toast[data-dimension]')).map(
      (el) => el.dataset.dimension ?? '',
    );
  }

  get notices(): string[] {
    return Array.from(this.root.querySelectorAll('.toast-notice')).map((el) => el.textContent ?? '');
  }
}
